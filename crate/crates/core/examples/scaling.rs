// Resource scaling of the four encodings with chain length.

use latfold::analysis::scaling_report;
use latfold::encoders::ModelKind;
use latfold::Result;

pub fn run() -> Result<String> {
    let models = [ModelKind::CoordCartesian, ModelKind::CoordTetrahedral, ModelKind::TurnTetrahedral, ModelKind::TurnCartesian];
    let report = scaling_report(&models, [6, 8, 10])?;
    let csv = report.to_csv();
    print!("{csv}");
    Ok(csv)
}

fn main() -> Result<()> {
    run().map(|_| ())
}
