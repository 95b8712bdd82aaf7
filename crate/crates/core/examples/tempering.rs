// Parallel tempering with the default coordinate-model ladder.

use latfold::encoders::{decode, encode_default, geometric_energy, InteractionModel, ModelKind, PeptideSequence};
use latfold::objective::Assignment;
use latfold::solvers::{parallel_tempering, PtConfig};
use latfold::Result;

pub fn run() -> Result<f64> {
    let seq = PeptideSequence::new("LKDEFG")?;
    let m = encode_default(ModelKind::CoordCartesian, &seq, &InteractionModel::miyazawa_jernigan(), None)?;
    let cfg = PtConfig { num_temps: 64, sweeps: 500, seed: 7, ..PtConfig::for_model(m.kind) };
    let r = parallel_tempering(&m.objective, &cfg)?;
    let best = r.best();
    let fold = decode(&m, &Assignment::boolean(best.bits.iter().copied()))?;
    let e = geometric_energy(&fold, &m.sequence, &m.interaction)?;
    for k in [0, 9, 99, 499] {
        println!("sweep {:>3}: lowest-T energy {:.3}", k + 1, r.trajectory[k]);
    }
    println!("best {:.3} (contact energy {e:.3}), physical {}", best.energy, fold.is_physical());
    Ok(e)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
