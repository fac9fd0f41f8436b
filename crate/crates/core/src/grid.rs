use crate::error::ModelError;

/// Uniform discretization of the age interval `[0, a_max]` into `n_cells`
/// cells of width `da`. Quantities live at cell centers `a_i = (i + 1/2)·da`.
///
/// The half-line of the continuous model is truncated at `a_max`; densities
/// decay at least like `e^{-mu0 a}`, so the neglected tail is controlled by
/// the model-level validation `a_max >= max β̄ + 5/mu0` (see
/// [`crate::ModelParams::on_grid`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgeGrid {
    a_max: f64,
    da: f64,
    n_cells: usize,
}

impl AgeGrid {
    pub fn new(a_max: f64, da: f64) -> Result<Self, ModelError> {
        if !(da.is_finite() && da > 0.0) {
            return Err(ModelError::validation(format!(
                "grid cell width must satisfy da > 0, got {da}"
            )));
        }
        if !(a_max.is_finite() && a_max >= da) {
            return Err(ModelError::validation(format!(
                "grid truncation age must satisfy a_max >= da, got a_max = {a_max}, da = {da}"
            )));
        }
        let n_cells = (a_max / da).round() as usize;
        if n_cells < 1 {
            return Err(ModelError::validation(
                "grid must contain at least one cell".to_string(),
            ));
        }
        if (n_cells as f64 * da - a_max).abs() >= da * 1e-9 {
            return Err(ModelError::validation(format!(
                "a_max = {a_max} is not an integer multiple of da = {da}"
            )));
        }
        Ok(AgeGrid { a_max, da, n_cells })
    }

    #[inline]
    pub fn a_max(&self) -> f64 {
        self.a_max
    }

    #[inline]
    pub fn da(&self) -> f64 {
        self.da
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Center of cell `i`.
    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.da
    }

    /// Lower edge of cell `i`.
    #[inline]
    pub fn lower_edge(&self, i: usize) -> f64 {
        i as f64 * self.da
    }

    /// Upper edge of cell `i`.
    #[inline]
    pub fn upper_edge(&self, i: usize) -> f64 {
        (i as f64 + 1.0) * self.da
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(|i| self.center(i))
    }
}
