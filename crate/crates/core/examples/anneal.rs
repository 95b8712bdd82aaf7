// Simulated annealing on a coordinate model: pick ζ, then estimate TTS.

use latfold::analysis::tts_from_samples;
use latfold::encoders::oracle::ground_state_in_grid;
use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::solvers::sa::tune_cooling_rate;
use latfold::solvers::{simulated_annealing, SaConfig};
use latfold::Result;

pub fn run() -> Result<(f64, f64)> {
    let seq = PeptideSequence::new("MKWVLA")?;
    let mj = InteractionModel::miyazawa_jernigan();
    let m = encode_default(ModelKind::CoordTetrahedral, &seq, &mj, None)?;
    let ground = ground_state_in_grid(&m.lattice().unwrap(), &seq, &mj).unwrap().energy;
    let base = SaConfig { restarts: 64, seed: 1, ..Default::default() };
    let (zeta, hits) = tune_cooling_rate(&m.objective, &base, &[0.99, 0.995, 0.999], ground)?;
    let set = simulated_annealing(&m.objective, &SaConfig { cooling_rate: zeta, seed: 2, ..base })?;
    let t = tts_from_samples(&set, ground, 1e-6)?;
    println!("ground {ground}, zeta {zeta} ({hits}/64 in tuning), best {}, p {:.3}, TTS {:.3e} s", set.best_energy(), t.p_ground, t.tts);
    Ok((set.best_energy(), ground))
}

fn main() -> Result<()> {
    run().map(|_| ())
}
