/// A point of the open unit interval carried together with its complement.
///
/// Near `r = 1` the complement `1 − r` cannot be recovered from `r` without
/// cancellation, so every computation that needs `(1 − r)^s` takes it from
/// here instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub r: f64,
    pub rc: f64,
}

impl UnitPoint {
    pub fn new(r: f64, rc: f64) -> Self {
        Self { r, rc }
    }

    pub fn from_r(r: f64) -> Self {
        Self { r, rc: 1.0 - r }
    }

    /// Point with logit coordinate `s = ln(r / (1 − r))`.
    pub fn from_logit(s: f64) -> Self {
        if s >= 0.0 {
            let e = (-s).exp();
            Self {
                r: 1.0 / (1.0 + e),
                rc: e / (1.0 + e),
            }
        } else {
            let e = s.exp();
            Self {
                r: e / (1.0 + e),
                rc: 1.0 / (1.0 + e),
            }
        }
    }

    pub fn logit(&self) -> f64 {
        self.r.ln() - self.rc.ln()
    }

    /// `ln r`, accurate for r close to 1.
    pub fn ln_r(&self) -> f64 {
        if self.r > 0.5 {
            (-self.rc).ln_1p()
        } else {
            self.r.ln()
        }
    }

    /// `r^k` together with `1 − r^k`.
    pub fn powf(&self, k: f64) -> Self {
        let l = k * self.ln_r();
        Self {
            r: l.exp(),
            rc: -l.exp_m1(),
        }
    }

    pub fn is_interior(&self) -> bool {
        self.r > 0.0 && self.rc > 0.0
    }
}
