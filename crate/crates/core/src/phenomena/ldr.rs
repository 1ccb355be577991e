//! LED and light-dependent-resistor bench measurements.

use std::io::Read;
use std::path::Path;

use super::PhenomenaError;
use crate::data::DataTable;

pub const COLUMNS: [&str; 4] = ["V", "I", "P", "R"];

/// Voltage drives the LED current and the light output; the light sets the
/// resistor.
pub const MODEL_DOMAIN: &str = "digraph {
    V -> I -> P -> R;
    V -> P;
}
";

/// Shape recovered by discovery: voltage drives everything, no `P -> R`.
pub const MODEL_DATA: &str = "digraph {
    V -> I;
    V -> P;
    V -> R;
}
";

/// Reads a `V,I,P,R` table (volts, milliamperes, lux, kilo-ohms).
pub fn read_ldr_dataset<R: Read>(reader: R) -> Result<DataTable, PhenomenaError> {
    let t = DataTable::read_csv(reader)?;
    if t.n_cols() == 0 {
        return Err(PhenomenaError::Empty("ldr".into()));
    }
    if t.names() != COLUMNS {
        return Err(PhenomenaError::BadHeader {
            file: "ldr".into(),
            expected: "`V,I,P,R`".into(),
            found: t.names().join(","),
        });
    }
    if t.n_rows() == 0 {
        return Err(PhenomenaError::Empty("ldr".into()));
    }
    if let Some(row) = t.column("R")?.iter().position(|r| *r <= 0.0) {
        return Err(PhenomenaError::Malformed {
            file: "ldr".into(),
            line: row + 2,
            message: "resistance is not positive".into(),
        });
    }
    Ok(t)
}

pub fn load_ldr_dataset(path: impl AsRef<Path>) -> Result<DataTable, PhenomenaError> {
    read_ldr_dataset(std::fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_empty() {
        assert!(matches!(
            read_ldr_dataset("V,I,P,R\n".as_bytes()),
            Err(PhenomenaError::Empty(_))
        ));
        assert!(matches!(read_ldr_dataset("".as_bytes()), Err(PhenomenaError::Empty(_))));
        assert!(matches!(
            read_ldr_dataset("V,I,R,P\n1,2,3,4\n".as_bytes()),
            Err(PhenomenaError::BadHeader { .. })
        ));
        let t = read_ldr_dataset("V,I,P,R\n2.67,100.3,5,37.000\n".as_bytes()).unwrap();
        assert_eq!(t.column("R").unwrap(), [37.0]);
    }
}
