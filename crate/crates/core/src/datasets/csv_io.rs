use std::collections::BTreeSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use super::{DataError, Dataset};
use crate::numeric::Matrix;

const GROUP_PREFIX: &str = "group:";

enum Column {
    Label,
    Feature,
    Group(String),
}

/// Reads a comma-separated file with a mandatory header.
///
/// Columns named `group:<tag>` hold 0/1 flags and become row tags; the label
/// column holds 0/1 labels; every other column must be numeric and becomes a
/// feature. Row numbers in errors are file line numbers (the header is line 1).
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    read_csv(file, label_column)
}

pub fn read_csv<R: Read>(reader: R, label_column: &str) -> Result<Dataset, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| malformed(1, e))?
        .iter()
        .map(str::to_owned)
        .collect::<Vec<_>>();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(DataError::EmptyFile);
    }

    let columns: Vec<Column> = headers
        .iter()
        .map(|h| {
            if h == label_column {
                Column::Label
            } else if let Some(tag) = h.strip_prefix(GROUP_PREFIX) {
                Column::Group(tag.to_owned())
            } else {
                Column::Feature
            }
        })
        .collect();
    if !columns.iter().any(|c| matches!(c, Column::Label)) {
        return Err(DataError::MissingLabelColumn(label_column.to_owned()));
    }
    let feature_names: Vec<String> = headers
        .iter()
        .zip(&columns)
        .filter(|(_, c)| matches!(c, Column::Feature))
        .map(|(h, _)| h.clone())
        .collect();

    let mut data = Vec::new();
    let mut labels = Vec::new();
    let mut tags = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e)
        })?;
        let row = record.position().map_or(0, |p| p.line());
        let mut row_tags = BTreeSet::new();
        for ((cell, column), name) in record.iter().zip(&columns).zip(&headers) {
            match column {
                Column::Label => labels.push(match cell {
                    "0" => 0,
                    "1" => 1,
                    other => {
                        return Err(DataError::InvalidLabel {
                            row,
                            value: other.to_owned(),
                        })
                    }
                }),
                Column::Group(tag) => match cell {
                    "0" => {}
                    "1" => {
                        row_tags.insert(tag.clone());
                    }
                    other => {
                        return Err(DataError::InvalidGroupFlag {
                            row,
                            column: name.clone(),
                            value: other.to_owned(),
                        })
                    }
                },
                Column::Feature => {
                    let value: f64 = cell.parse().map_err(|_| DataError::NonNumeric {
                        row,
                        column: name.clone(),
                        value: cell.to_owned(),
                    })?;
                    if !value.is_finite() {
                        return Err(DataError::NonNumeric {
                            row,
                            column: name.clone(),
                            value: cell.to_owned(),
                        });
                    }
                    data.push(value);
                }
            }
        }
        tags.push(row_tags);
    }
    if labels.is_empty() {
        return Err(DataError::EmptyFile);
    }
    let features = Matrix::from_vec(labels.len(), feature_names.len(), data)?;
    Dataset::new(features, labels, feature_names, tags)
}

fn malformed(row: u64, err: csv::Error) -> DataError {
    DataError::Malformed {
        row,
        message: err.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset, DataError> {
        read_csv(text.as_bytes(), "label")
    }

    #[test]
    fn three_rows_two_features() {
        let d = parse("a,b,label\n1,2,0\n3,4,1\n5.5,-6,0\n").unwrap();
        assert_eq!(d.features().shape(), (3, 2));
        assert_eq!(d.labels(), &[0, 1, 0]);
        assert_eq!(d.feature_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(d.features().row(2), &[5.5, -6.0]);
    }

    #[test]
    fn group_columns_become_tags() {
        let d = parse("a,group:elective,label\n1,1,0\n2,0,1\n3,1,1\n").unwrap();
        assert_eq!(d.n_features(), 1);
        assert!(d.group_tags()[0].contains("elective"));
        assert!(d.group_tags()[1].is_empty());
        assert!(d.group_tags()[2].contains("elective"));
    }

    #[test]
    fn bad_label_names_row() {
        let err = parse("a,label\n1,0\n2,2\n").unwrap_err();
        assert_eq!(
            err,
            DataError::InvalidLabel {
                row: 3,
                value: "2".into()
            }
        );
        assert!(err.to_string().contains("row 3"));
    }

    #[test]
    fn missing_label_column() {
        assert_eq!(
            parse("a,b\n1,2\n").unwrap_err(),
            DataError::MissingLabelColumn("label".into())
        );
    }

    #[test]
    fn non_numeric_cell() {
        let err = parse("a,b,label\n1,x,0\n").unwrap_err();
        assert_eq!(
            err,
            DataError::NonNumeric {
                row: 2,
                column: "b".into(),
                value: "x".into()
            }
        );
    }

    #[test]
    fn empty_inputs() {
        assert_eq!(parse("").unwrap_err(), DataError::EmptyFile);
        assert_eq!(parse("a,label\n").unwrap_err(), DataError::EmptyFile);
    }

    #[test]
    fn ragged_row_is_malformed() {
        assert!(matches!(
            parse("a,b,label\n1,2\n").unwrap_err(),
            DataError::Malformed { .. }
        ));
    }
}
