//! Writing a Wigner function and its header to CSV.

use phasespace::io::{write_output, Format, Table};
use phasespace::*;

fn main() -> Result<()> {
    let grid = make_phase_grid(64, 8.0, 1.0)?;
    let phi = hermite_eigenstate(1, &OscillatorUnits::default(), &grid.qgrid)?;
    let w = wigner_from_pure(&phi, &grid)?;
    let dir = std::env::temp_dir().join("phasespace-example");
    let header = serde_json::json!({ "n": 1, "s": 0.0, "normalization": w.normalization().re });
    for path in write_output(&dir, "wigner_n1", &header, &Table::field(&w.field), Format::Csv)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
