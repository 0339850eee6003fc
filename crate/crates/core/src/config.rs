//! Every tunable default in one place.
//!
//! | name                | default | meaning                                              |
//! |---------------------|---------|------------------------------------------------------|
//! | `m0`                | 5       | modulus-sum threshold for a curve to be short        |
//! | `m0_floor`          | 3       | smallest accepted `m0`                               |
//! | `t_step`            | 0.1     | scan grid step                                       |
//! | `develop_budget`    | 10⁶     | developed triangles per enumeration                  |
//! | `tighten_budget`    | 10⁴     | local moves per tightening                           |
//! | `diam_grid`         | 8       | barycentric subdivision used by the diameter graph   |
//! | `diam_sweeps`       | 4       | Dijkstra sweeps per diameter estimate                |
//! | `balanced_band`     | 0.05    | relative width of the Balanced dead zone             |
//! | `twist_mode`        | PerStrand | twist per crossing arc (max) or summed over arcs   |

#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TwistMode {
    /// Largest wrap count over the crossing arcs.
    PerStrand,
    /// Sum of the wrap counts over all crossing arcs.
    Total,
}

#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Config {
    pub m0: f64,
    pub m0_floor: f64,
    pub t_step: f64,
    pub develop_budget: usize,
    pub tighten_budget: usize,
    pub diam_grid: usize,
    pub diam_sweeps: usize,
    pub balanced_band: f64,
    pub twist_mode: TwistMode,
}

pub const DEFAULT_M0: f64 = 5.0;
pub const M0_FLOOR: f64 = 3.0;
pub const DEFAULT_T_STEP: f64 = 0.1;
pub const DEVELOP_BUDGET: usize = 1_000_000;
pub const TIGHTEN_BUDGET: usize = 10_000;

impl Default for Config {
    fn default() -> Self {
        Config {
            m0: DEFAULT_M0,
            m0_floor: M0_FLOOR,
            t_step: DEFAULT_T_STEP,
            develop_budget: DEVELOP_BUDGET,
            tighten_budget: TIGHTEN_BUDGET,
            diam_grid: 8,
            diam_sweeps: 4,
            balanced_band: 0.05,
            twist_mode: TwistMode::PerStrand,
        }
    }
}

impl Config {
    pub fn with_m0(mut self, m0: f64) -> Self {
        self.m0 = m0;
        self
    }

    pub fn validate(&self) -> crate::Result<()> {
        let bad = |m: alloc::string::String| Err(crate::Error::Invalid(m));
        if !(self.m0 > self.m0_floor) || !self.m0.is_finite() {
            return bad(alloc::format!("m0 must exceed {}, got {}", self.m0_floor, self.m0));
        }
        if !(self.t_step > 0.0) || !self.t_step.is_finite() {
            return bad(alloc::format!("t_step must be positive, got {}", self.t_step));
        }
        if self.develop_budget == 0 || self.tighten_budget == 0 || self.diam_grid == 0 || self.diam_sweeps == 0 {
            return bad("budgets and diameter settings must be positive".into());
        }
        if !(0.0..1.0).contains(&self.balanced_band) {
            return bad(alloc::format!("balanced_band must lie in [0, 1), got {}", self.balanced_band));
        }
        Ok(())
    }

    /// Circumference above which no cylinder can reach the modulus sum `m0`.
    pub fn short_circumference_bound(&self, area: f64) -> f64 {
        (3.0 * area / self.m0).sqrt()
    }
}
