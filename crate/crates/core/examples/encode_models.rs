// One sequence in all four encodings: variable counts, degree, density.

use latfold::encoders::{encode_default, InteractionModel, ModelKind, PeptideSequence};
use latfold::Result;

pub fn run() -> Result<Vec<(ModelKind, usize, usize)>> {
    let seq = PeptideSequence::new("LKDEFGA")?;
    let mj = InteractionModel::miyazawa_jernigan();
    let mut out = Vec::new();
    for kind in ModelKind::ALL {
        let m = encode_default(kind, &seq, &mj, None)?;
        let side = m.lattice().map_or("-".to_string(), |l| l.side.to_string());
        println!("{kind:<10} L={side:<2} vars={:<4} degree={} terms={}", m.num_vars(), m.objective.degree(), m.objective.num_terms());
        out.push((kind, m.num_vars(), m.objective.degree()));
    }
    Ok(out)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
