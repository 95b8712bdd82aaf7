// Spin-overlap distribution from two independent PT runs.

use latfold::analysis::{classify_barriers, peaks, spin_overlap, Barriers};
use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::solvers::{parallel_tempering, PtConfig};
use latfold::Result;

pub fn run() -> Result<Barriers> {
    let seq = PeptideSequence::new("HPPH")?;
    let m = encode_default(ModelKind::CoordCartesian, &seq, &InteractionModel::hp(-1.0)?, Some(2))?;
    let cfg = |seed| PtConfig { num_temps: 32, sweeps: 4000, measure_sweeps: 2000, seed, ..PtConfig::for_model(m.kind) };
    let a = parallel_tempering(&m.objective, &cfg(1))?;
    let b = parallel_tempering(&m.objective, &cfg(2))?;
    let (_, h) = spin_overlap(&a.window, &b.window, None, 101)?;
    for k in h.occupied() {
        println!("q = {:+.3}: {}", h.center(k), h.counts[k]);
    }
    let class = classify_barriers(&h, 0.5)?;
    println!("peaks {:?}, barriers {class:?}", peaks(&h).iter().map(|&k| h.center(k)).collect::<Vec<_>>());
    Ok(class)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
