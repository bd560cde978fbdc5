//! CSV ingestion of discrete laws. Two grammars, header optional:
//! one column of sample values (equal weights) or `value,prob` rows.

use std::path::Path;

use haezendonck::DiscreteRV;

use crate::CliError;

pub fn read_discrete_csv(path: &Path) -> Result<DiscreteRV, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;

    let mut rows: Vec<(usize, Vec<String>)> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record =
            record.map_err(|e| CliError::Input(format!("row {}: {e}", idx + 1)))?;
        let fields: Vec<String> = record
            .iter()
            .map(str::to_string)
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        rows.push((idx + 1, fields));
    }
    if rows.is_empty() {
        return Err(CliError::Input(format!("{}: no data rows", path.display())));
    }
    // optional header: skip the first row when it does not parse numerically
    if rows[0].1.iter().any(|f| f.parse::<f64>().is_err()) {
        rows.remove(0);
        if rows.is_empty() {
            return Err(CliError::Input(format!(
                "{}: only a header row present",
                path.display()
            )));
        }
    }

    let columns = rows[0].1.len();
    if columns > 2 {
        return Err(CliError::Input(format!(
            "row {}: expected 1 or 2 columns, found {columns}",
            rows[0].0
        )));
    }
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(rows.len());
    let weight = 1.0 / rows.len() as f64;
    for (line, fields) in &rows {
        if fields.len() != columns {
            return Err(CliError::Input(format!(
                "row {line}: expected {columns} columns, found {}",
                fields.len()
            )));
        }
        let value: f64 = fields[0]
            .parse()
            .map_err(|_| CliError::Input(format!("row {line}: bad value '{}'", fields[0])))?;
        let prob: f64 = if columns == 2 {
            fields[1]
                .parse()
                .map_err(|_| CliError::Input(format!("row {line}: bad probability '{}'", fields[1])))?
        } else {
            weight
        };
        pairs.push((value, prob));
    }
    DiscreteRV::new(&pairs).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn single_column_gets_equal_weights() {
        let f = write_tmp("1\n2\n3\n4\n");
        let x = read_discrete_csv(f.path()).unwrap();
        assert_eq!(x.len(), 4);
        assert!((x.atoms()[0].prob - 0.25).abs() < 1e-15);
    }

    #[test]
    fn two_columns_are_value_prob() {
        let f = write_tmp("value,prob\n1.0,0.25\n3.0,0.75\n");
        let x = read_discrete_csv(f.path()).unwrap();
        assert_eq!(x.len(), 2);
        assert!((x.atoms()[1].prob - 0.75).abs() < 1e-15);
    }

    #[test]
    fn malformed_row_is_reported_with_its_number() {
        let f = write_tmp("1.0,0.5\noops,0.5\n");
        let err = read_discrete_csv(f.path()).unwrap_err();
        assert!(format!("{err:?}").contains("row 2"));
    }

    #[test]
    fn duplicate_samples_merge() {
        let f = write_tmp("2\n2\n5\n5\n");
        let x = read_discrete_csv(f.path()).unwrap();
        assert_eq!(x.len(), 2);
        assert!((x.atoms()[0].prob - 0.5).abs() < 1e-15);
    }
}
