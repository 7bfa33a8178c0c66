//! Prints run statistics for the Brusselator and vehicle presets next to the
//! published counts.

use twostep::driver::{integrate, IntegrationConfig};
use twostep::problems::presets::{TABLE1_LIMIT_CYCLE, TABLE1_STIFF};
use twostep::problems::{Preset, TABLE1_ICS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = IntegrationConfig::with_tol(1e-4);
    for (preset, table) in [
        (Preset::BrusselatorLimitCycle, TABLE1_LIMIT_CYCLE),
        (Preset::BrusselatorStiff, TABLE1_STIFF),
    ] {
        println!("{preset}");
        println!("  {:<12} {:>7} {:>7} {:>7} {:>7} {:>9}   published", "ic", "steps", "halved", "doubled", "redo", "max eps");
        for (ic, published) in TABLE1_ICS.iter().zip(table) {
            let s = integrate(&preset.build(Some(*ic), None, None)?, &cfg)?;
            let st = s.stats;
            println!(
                "  {:<12} {:>7} {:>7} {:>7} {:>7} {:>9.2e}   {:?}  final {:?}",
                format!("{ic:?}"),
                st.local_steps,
                st.halvings,
                st.doublings,
                st.restarts,
                s.max_eps(),
                published,
                s.last().x.as_slice()
            );
        }
    }
    let s = integrate(&Preset::FsaeBumps.build(None, None, None)?, &cfg)?;
    println!(
        "fsae-bumps: {:?}, max eps {:.2e}, final {:?}",
        s.stats,
        s.max_eps(),
        s.last().x.as_slice()
    );
    Ok(())
}
