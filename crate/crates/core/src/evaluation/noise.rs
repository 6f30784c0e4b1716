use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Percentage of tokens with ground-truth class `i` that carry given label `j`.
///
/// Diagonal cells are `None`; so is every cell of a row whose class never
/// occurs in the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseMatrix {
    pub classes: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
    /// Tokens per ground-truth class.
    pub support: Vec<usize>,
}

pub fn noise_matrix(ds: &Dataset) -> Result<NoiseMatrix> {
    let k = ds.label_space.len();
    let mut counts = vec![vec![0usize; k]; k];
    for s in &ds.sentences {
        let truth = s
            .true_labels
            .as_ref()
            .ok_or(Error::MissingTruth { id: s.id })?;
        for (&t, &g) in truth.iter().zip(&s.given_labels) {
            counts[t][g] += 1;
        }
    }
    let support: Vec<usize> = counts.iter().map(|row| row.iter().sum()).collect();
    let cells = counts
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &c)| {
                    (i != j && support[i] > 0).then(|| 100.0 * c as f64 / support[i] as f64)
                })
                .collect()
        })
        .collect();
    Ok(NoiseMatrix {
        classes: ds.label_space.classes().to_vec(),
        cells,
        support,
    })
}

impl NoiseMatrix {
    /// Aligned text table with two-decimal percentages; zero cells are blank.
    pub fn to_table(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(1)
            .max(7);
        let mut out = format!("{:<width$}", "");
        for c in &self.classes {
            out.push_str(&format!(" {c:>width$}"));
        }
        out.push('\n');
        for (i, row) in self.cells.iter().enumerate() {
            out.push_str(&format!("{:<width$}", self.classes[i]));
            for (j, cell) in row.iter().enumerate() {
                let text = match cell {
                    _ if i == j => "-".to_string(),
                    None => "n/a".to_string(),
                    Some(v) if *v == 0.0 => String::new(),
                    Some(v) => format!("{v:.2}%"),
                };
                out.push_str(&format!(" {text:>width$}"));
            }
            out.push('\n');
        }
        out
    }
}
