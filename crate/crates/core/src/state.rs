use crate::error::ModelError;
use crate::grid::AgeGrid;

/// Simulation state: susceptible density plus one age-density array per
/// strain (values at cell centers).
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub s: f64,
    pub densities: Vec<Vec<f64>>,
}

impl State {
    pub fn new(s: f64, densities: Vec<Vec<f64>>) -> Self {
        State { s, densities }
    }

    pub fn zeros(n_strains: usize, grid: &AgeGrid) -> Self {
        State {
            s: 0.0,
            densities: vec![vec![0.0; grid.n_cells()]; n_strains],
        }
    }

    pub fn n_strains(&self) -> usize {
        self.densities.len()
    }

    /// Checks shape against the grid, finiteness and nonnegativity.
    pub fn validate(&self, grid: &AgeGrid) -> Result<(), ModelError> {
        if !self.s.is_finite() {
            return Err(ModelError::NonFiniteState);
        }
        if self.s < 0.0 {
            return Err(ModelError::validation(format!(
                "susceptible density must be >= 0, got {}",
                self.s
            )));
        }
        for (k, d) in self.densities.iter().enumerate() {
            if d.len() != grid.n_cells() {
                return Err(ModelError::ShapeMismatch(format!(
                    "strain {k} density has {} cells, grid has {}",
                    d.len(),
                    grid.n_cells()
                )));
            }
            for (i, v) in d.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFiniteState);
                }
                if *v < 0.0 {
                    return Err(ModelError::validation(format!(
                        "strain {k} density must be >= 0, got {v} in cell {i}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Total mass `∫ x_k da` of one strain.
    pub fn mass(&self, strain: usize, grid: &AgeGrid) -> f64 {
        self.densities[strain].iter().sum::<f64>() * grid.da()
    }

    /// `S + Σ_k ∫ x_k da`.
    pub fn total(&self, grid: &AgeGrid) -> f64 {
        self.s
            + (0..self.n_strains())
                .map(|k| self.mass(k, grid))
                .sum::<f64>()
    }

    /// Discrete L¹ distance: `|ΔS| + Σ_k Σ_i |Δx_k(a_i)|·da`.
    pub fn distance(&self, other: &State, grid: &AgeGrid) -> Result<f64, ModelError> {
        if self.n_strains() != other.n_strains() {
            return Err(ModelError::ShapeMismatch(format!(
                "states have {} and {} strains",
                self.n_strains(),
                other.n_strains()
            )));
        }
        let mut dist = (self.s - other.s).abs();
        for (a, b) in self.densities.iter().zip(&other.densities) {
            if a.len() != b.len() || a.len() != grid.n_cells() {
                return Err(ModelError::ShapeMismatch(format!(
                    "density arrays of lengths {} and {} on a {}-cell grid",
                    a.len(),
                    b.len(),
                    grid.n_cells()
                )));
            }
            dist += a
                .iter()
                .zip(b)
                .map(|(u, v)| (u - v).abs())
                .sum::<f64>()
                * grid.da();
        }
        Ok(dist)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_identity_and_scalar_part() {
        let g = AgeGrid::new(1.0, 0.25).unwrap();
        let a = State::new(2.0, vec![vec![0.1, 0.2, 0.0, 0.4], vec![0.0; 4]]);
        assert_eq!(a.distance(&a, &g).unwrap(), 0.0);

        let mut b = a.clone();
        b.s += 1.0;
        assert_eq!(a.distance(&b, &g).unwrap(), 1.0);
    }

    #[test]
    fn distance_single_cell_difference() {
        let g = AgeGrid::new(1.0, 0.25).unwrap();
        let a = State::zeros(1, &g);
        let mut b = a.clone();
        b.densities[0][2] = 0.5;
        assert_eq!(a.distance(&b, &g).unwrap(), 0.5 * 0.25);
    }

    #[test]
    fn distance_shape_mismatch() {
        let g = AgeGrid::new(1.0, 0.25).unwrap();
        let a = State::zeros(1, &g);
        let b = State::zeros(2, &g);
        assert!(a.distance(&b, &g).is_err());
        let c = State::new(0.0, vec![vec![0.0; 3]]);
        assert!(a.distance(&c, &g).is_err());
    }

    #[test]
    fn validate_rejects_bad_states() {
        let g = AgeGrid::new(1.0, 0.25).unwrap();
        let mut s = State::zeros(1, &g);
        s.validate(&g).unwrap();
        s.densities[0][1] = -0.1;
        assert!(s.validate(&g).is_err());
        s.densities[0][1] = f64::NAN;
        assert!(matches!(s.validate(&g), Err(ModelError::NonFiniteState)));
    }
}
