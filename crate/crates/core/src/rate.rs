use crate::error::ModelError;
use crate::grid::AgeGrid;

/// One piece of a piecewise-constant rate: `value` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
}

/// A nonnegative piecewise-constant function of age, zero outside its
/// segments. Used for both mortality and transmission rates.
///
/// Segment breakpoints need not align with grid cells: quantities on a grid
/// are obtained through [`RateFunction::cell_averages`], which integrates the
/// rate exactly over each cell, so integrals of the rate are preserved
/// regardless of alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFunction {
    segments: Vec<Segment>,
}

impl RateFunction {
    /// Builds a rate from `(lo, hi, value)` triples. Segments must be sorted,
    /// non-overlapping (touching is fine), with `lo < hi` and finite
    /// `value >= 0`.
    pub fn new(segments: Vec<(f64, f64, f64)>) -> Result<Self, ModelError> {
        let segments: Vec<Segment> = segments
            .into_iter()
            .map(|(lo, hi, value)| Segment { lo, hi, value })
            .collect();
        for s in &segments {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo >= 0.0 && s.lo < s.hi) {
                return Err(ModelError::validation(format!(
                    "rate segment must satisfy 0 <= a_lo < a_hi, got [{}, {})",
                    s.lo, s.hi
                )));
            }
            if !(s.value.is_finite() && s.value >= 0.0) {
                return Err(ModelError::validation(format!(
                    "rate value must be finite and >= 0, got {}",
                    s.value
                )));
            }
        }
        for w in segments.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(ModelError::validation(format!(
                    "rate segments must be sorted and disjoint: [{}, {}) overlaps [{}, {})",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(RateFunction { segments })
    }

    /// Constant rate `value` on `[lo, hi)`.
    pub fn constant(value: f64, lo: f64, hi: f64) -> Result<Self, ModelError> {
        Self::new(vec![(lo, hi, value)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Pointwise evaluation; zero outside all segments.
    pub fn value_at(&self, a: f64) -> f64 {
        for s in &self.segments {
            if a >= s.lo && a < s.hi {
                return s.value;
            }
        }
        0.0
    }

    /// Exact integral over `[lo, hi)`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let mut sum = 0.0;
        for s in &self.segments {
            let l = s.lo.max(lo);
            let h = s.hi.min(hi);
            if h > l {
                sum += s.value * (h - l);
            }
        }
        sum
    }

    /// Average of the rate over each grid cell (exact integral divided by
    /// the cell width). A cell straddling a breakpoint gets the average of
    /// the rate over that cell.
    pub fn cell_averages(&self, grid: &AgeGrid) -> Vec<f64> {
        (0..grid.n_cells())
            .map(|i| self.integral(grid.lower_edge(i), grid.upper_edge(i)) / grid.da())
            .collect()
    }

    pub fn is_identically_zero(&self) -> bool {
        self.segments.iter().all(|s| s.value == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.segments.iter().fold(0.0, |m, s| m.max(s.value))
    }

    /// The support `[lo, hi)` of the positive part, provided the
    /// positive-valued segments form one contiguous interval. Returns `None`
    /// when the rate is identically zero or the support has gaps.
    pub fn support_interval(&self) -> Option<(f64, f64)> {
        let pos: Vec<&Segment> = self.segments.iter().filter(|s| s.value > 0.0).collect();
        let first = pos.first()?;
        let mut hi = first.hi;
        for s in pos.iter().skip(1) {
            if (s.lo - hi).abs() > 1e-12 * hi.max(1.0) {
                return None;
            }
            hi = s.hi;
        }
        Some((first.lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn evaluation_and_integral() {
        let r = RateFunction::new(vec![(0.0, 1.0, 2.0), (1.0, 2.0, 0.5)]).unwrap();
        assert_eq!(r.value_at(0.5), 2.0);
        assert_eq!(r.value_at(1.5), 0.5);
        assert_eq!(r.value_at(2.5), 0.0);
        assert_relative_eq!(r.integral(0.0, 2.0), 2.5);
        assert_relative_eq!(r.integral(0.5, 1.5), 1.25);
    }

    #[test]
    fn cell_average_straddles_breakpoint() {
        // breakpoint at 0.25 sits inside cell [0.2, 0.4)
        let r = RateFunction::new(vec![(0.0, 0.25, 4.0)]).unwrap();
        let g = AgeGrid::new(0.4, 0.2).unwrap();
        let avg = r.cell_averages(&g);
        assert_relative_eq!(avg[0], 4.0);
        assert_relative_eq!(avg[1], 4.0 * 0.05 / 0.2);
        // integral preserved exactly
        let total: f64 = avg.iter().map(|v| v * g.da()).sum();
        assert_relative_eq!(total, 1.0);
    }

    #[test]
    fn rejects_overlap_and_negative() {
        assert!(RateFunction::new(vec![(0.0, 1.0, 1.0), (0.5, 2.0, 1.0)]).is_err());
        assert!(RateFunction::new(vec![(0.0, 1.0, -1.0)]).is_err());
        assert!(RateFunction::new(vec![(1.0, 1.0, 1.0)]).is_err());
        assert!(RateFunction::new(vec![(-0.5, 1.0, 1.0)]).is_err());
    }

    #[test]
    fn support_interval_detection() {
        let r = RateFunction::new(vec![(0.5, 1.0, 1.0), (1.0, 1.5, 2.0)]).unwrap();
        assert_eq!(r.support_interval(), Some((0.5, 1.5)));

        let gap = RateFunction::new(vec![(0.0, 1.0, 1.0), (2.0, 3.0, 1.0)]).unwrap();
        assert_eq!(gap.support_interval(), None);

        // zero-valued segment splits the support
        let split =
            RateFunction::new(vec![(0.0, 1.0, 1.0), (1.0, 2.0, 0.0), (2.0, 3.0, 1.0)]).unwrap();
        assert_eq!(split.support_interval(), None);

        let zero = RateFunction::constant(0.0, 0.0, 1.0).unwrap();
        assert!(zero.is_identically_zero());
        assert_eq!(zero.support_interval(), None);
    }
}
