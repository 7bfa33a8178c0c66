//! Measured global convergence slopes for every family, corrector variant and
//! closed-form problem, plus local orders of the one-step startup methods.

use twostep::driver::{convergence_study, startup_study, SolverFamily};
use twostep::problems::AnalyticProblem;
use twostep::CorrectorVariant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let hs = [0.1, 0.05, 0.025, 0.0125];
    for family in SolverFamily::ALL {
        let variants: &[CorrectorVariant] = match family {
            SolverFamily::FirstOrder => &[CorrectorVariant::Type2],
            _ => &CorrectorVariant::ALL,
        };
        for &variant in variants {
            for problem in AnalyticProblem::ALL {
                let study = convergence_study(problem, family, variant, 2.0, &hs)?;
                let label = if family == SolverFamily::FirstOrder { "-".to_string() } else { variant.to_string() };
                println!("{family:<13} {label:<9} {problem:<14} slope {:.3}", study.slope);
            }
        }
    }
    for family in SolverFamily::ALL {
        for problem in AnalyticProblem::ALL {
            let study = startup_study(problem, family, &[0.1, 0.05, 0.025, 0.0125])?;
            println!("startup {family:<13} {problem:<14} local order {:.3}", study.slope);
        }
    }
    Ok(())
}
