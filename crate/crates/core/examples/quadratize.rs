// Reduce a cubic turn-based model to a QUBO and check the landscape survives.

use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::reduction::{quadratize, verify_quadratization, AlphaPolicy};
use latfold::Result;

pub fn run() -> Result<(usize, usize, bool)> {
    let seq = PeptideSequence::new("LKDEFG")?;
    let m = encode_default(ModelKind::TurnTetrahedral, &seq, &InteractionModel::miyazawa_jernigan(), None)?;
    let r = quadratize(&m.objective, AlphaPolicy::WorstCase)?;
    let rep = verify_quadratization(&m.objective, &r, 24)?;
    println!(
        "{} vars (degree {}) -> {} vars, {} aux, alpha {}, verified: {}",
        m.num_vars(),
        m.objective.degree(),
        r.qubo.num_vars(),
        r.aux_map.len(),
        r.alpha,
        rep.passed
    );
    Ok((m.num_vars(), r.qubo.num_vars(), rep.passed))
}

fn main() -> Result<()> {
    run().map(|_| ())
}
