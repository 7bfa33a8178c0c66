//! Named benchmark configurations.

use std::fmt;
use std::str::FromStr;

use crate::error::{IntegrateError, IntegrateResult};
use crate::problem::Problem;
use crate::problems::brusselator::BrusselatorParams;
use crate::problems::vehicle::VehicleParams;

/// The four Brusselator initial conditions of the published runtime table.
pub const TABLE1_ICS: [[f64; 2]; 4] = [[0.1, 0.1], [1.5, 3.0], [2.0, 0.5], [3.25, 2.5]];

/// Published (steps, halved, doubled) for each entry of [`TABLE1_ICS`].
pub const TABLE1_LIMIT_CYCLE: [[u64; 3]; 4] = [[1186, 6, 9], [1592, 6, 9], [1332, 7, 10], [1451, 6, 12]];
pub const TABLE1_STIFF: [[u64; 3]; 4] = [[353, 0, 6], [362, 0, 4], [467, 0, 3], [414, 0, 5]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    BrusselatorLimitCycle,
    BrusselatorStiff,
    FsaeBumps,
}

impl Preset {
    pub const ALL: [Preset; 3] = [
        Preset::BrusselatorLimitCycle,
        Preset::BrusselatorStiff,
        Preset::FsaeBumps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::BrusselatorLimitCycle => "brusselator-limit-cycle",
            Preset::BrusselatorStiff => "brusselator-stiff",
            Preset::FsaeBumps => "fsae-bumps",
        }
    }

    pub fn t_end(self) -> f64 {
        match self {
            Preset::BrusselatorLimitCycle => 20.0,
            Preset::BrusselatorStiff => 0.1,
            Preset::FsaeBumps => 4.0,
        }
    }

    pub fn n_global(self) -> usize {
        match self {
            Preset::BrusselatorLimitCycle => 200,
            Preset::BrusselatorStiff => 100,
            Preset::FsaeBumps => 500,
        }
    }

    pub fn brusselator(self, ic: [f64; 2]) -> Option<BrusselatorParams> {
        let (a, b) = match self {
            Preset::BrusselatorLimitCycle => (1.0, 3.0),
            Preset::BrusselatorStiff => (100.0, 3.0),
            Preset::FsaeBumps => return None,
        };
        Some(BrusselatorParams { a, b, y0: ic })
    }

    /// Builds the problem; `ic` applies to the Brusselator presets only and
    /// defaults to the first table entry.
    pub fn build(self, ic: Option<[f64; 2]>, t_end: Option<f64>, n_global: Option<usize>) -> IntegrateResult<Problem> {
        let t_end = t_end.unwrap_or(self.t_end());
        let n = n_global.unwrap_or(self.n_global());
        match self.brusselator(ic.unwrap_or(TABLE1_ICS[0])) {
            Some(p) => {
                p.validate()?;
                Ok(p.problem(t_end, n).into())
            }
            None => {
                if ic.is_some() {
                    return Err(IntegrateError::Config(format!(
                        "preset {} takes no initial condition",
                        self.name()
                    )));
                }
                Ok(VehicleParams::fsae().problem(t_end, n)?.into())
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = IntegrateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                IntegrateError::Config(format!(
                    "unknown preset '{s}' (expected brusselator-limit-cycle, brusselator-stiff or fsae-bumps)"
                ))
            })
    }
}
