// Exact ground states of a turn-based tetrahedral model. Half of the
// degenerate minimizers of this sequence are folds that cross themselves.

use latfold::encoders::{decode, encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::objective::Assignment;
use latfold::solvers::{solve_exact, ExactConfig};
use latfold::Result;

pub fn run() -> Result<(f64, usize, usize)> {
    let seq = PeptideSequence::new("LKKKKLKKKKL")?;
    let m = encode_default(ModelKind::TurnTetrahedral, &seq, &InteractionModel::miyazawa_jernigan(), None)?;
    let r = solve_exact(&m, &ExactConfig::default())?;
    let mut crossing = 0;
    for bits in &r.minimizers {
        let f = decode(&m, &Assignment::boolean(bits.iter().copied()))?;
        if !f.self_avoiding {
            crossing += 1;
        }
        println!("{} self_avoiding={}", bits.iter().map(|b| b.to_string()).collect::<String>(), f.self_avoiding);
    }
    println!("E = {:.4}, {} minimizers, {crossing} self-intersecting ({:?}, {} nodes)", r.ground_energy, r.minimizers.len(), r.method, r.nodes);
    Ok((r.ground_energy, r.minimizers.len(), crossing))
}

fn main() -> Result<()> {
    run().map(|_| ())
}
