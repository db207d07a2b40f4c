use crate::error::{invalid, Error, Result};
use crate::fe::ScalarField;
use crate::Point;

/// `(R^(k+1) - |x|^(k+1)) / (k + 1)`: the arrival time of a circle of radius
/// `R` shrinking with normal speed `curvature^k`.
pub fn exact_disk_arrival_time(k: f64, radius: f64, x: Point) -> Result<f64> {
    let d = ExactDisk::new(k, radius)?;
    let r = x[0].hypot(x[1]);
    if r > radius * (1.0 + 1e-12) {
        return Err(Error::PointOutside(x[0], x[1]));
    }
    Ok(d.profile(r.min(radius)))
}

/// The disk arrival time as a [`ScalarField`].
#[derive(Debug, Clone, Copy)]
pub struct ExactDisk {
    k: f64,
    radius: f64,
}

impl ExactDisk {
    pub fn new(k: f64, radius: f64) -> Result<Self> {
        if !(k > 1.0) {
            return Err(invalid(format!("k must exceed 1, got {k}")));
        }
        if !(radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        Ok(Self { k, radius })
    }

    pub fn profile(&self, r: f64) -> f64 {
        (self.radius.powf(self.k + 1.0) - r.powf(self.k + 1.0)) / (self.k + 1.0)
    }

    /// `u'(r) = -r^k`.
    pub fn slope(&self, r: f64) -> f64 {
        -r.powf(self.k)
    }
}

impl ScalarField for ExactDisk {
    fn value(&self, p: Point) -> f64 {
        self.profile(p[0].hypot(p[1]))
    }

    fn gradient(&self, p: Point) -> [f64; 2] {
        // -r^k p / r
        let s = p[0].hypot(p[1]).powf(self.k - 1.0);
        [-s * p[0], -s * p[1]]
    }
}
