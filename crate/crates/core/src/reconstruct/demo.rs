use std::fmt::Write as _;

use super::fmt_real;
use crate::dist::{Distribution, Grid};

/// Two component orderings with the same law of `max(X0, X1)`.
#[derive(Debug, Clone)]
pub struct NonUniquenessDemo {
    pub f0: Distribution,
    pub f1: Distribution,
    pub grid: Grid,
    /// `F0(y) F1(y)` on the grid.
    pub product: Vec<f64>,
    /// `F1(y) F0(y)` on the grid.
    pub swapped_product: Vec<f64>,
    /// Grid point with the largest `|F0 - F1|` and that gap.
    pub witness: Option<(f64, f64)>,
}

impl NonUniquenessDemo {
    /// `f0` and `f1` agree at every grid point.
    pub fn degenerate(&self) -> bool {
        self.witness.is_none()
    }

    pub fn products_identical(&self) -> bool {
        self.product
            .iter()
            .zip(&self.swapped_product)
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model A: X0 ~ {}, X1 ~ {}", self.f0, self.f1);
        let _ = writeln!(s, "model B: X0 ~ {}, X1 ~ {}", self.f1, self.f0);
        s.push_str("y,F0,F1,product_A,product_B\n");
        for (k, &y) in self.grid.points().iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt_real(y),
                fmt_real(self.f0.cdf(y)),
                fmt_real(self.f1.cdf(y)),
                fmt_real(self.product[k]),
                fmt_real(self.swapped_product[k])
            );
        }
        match self.witness {
            Some((y, gap)) => {
                let _ = writeln!(
                    s,
                    "Y1 has the same law under both models, yet F0 and F1 differ by {gap:.6} at y = {y}."
                );
            }
            None => s.push_str("F0 and F1 agree on the grid: the swap changes nothing.\n"),
        }
        let _ = write!(
            s,
            "#summary,products_identical={},degenerate={}",
            self.products_identical(),
            self.degenerate()
        );
        if let Some((y, gap)) = self.witness {
            let _ = write!(s, ",witness_y={},witness_gap={}", fmt_real(y), fmt_real(gap));
        }
        s.push('\n');
        s
    }
}

/// Shows that the law of `max(X0, X1)` cannot tell `(F0, F1)` from `(F1, F0)`.
pub fn single_max_nonuniqueness_demo(
    f0: &Distribution,
    f1: &Distribution,
    grid: &Grid,
) -> NonUniquenessDemo {
    let pts = grid.points();
    let product = pts.iter().map(|&y| f0.cdf(y) * f1.cdf(y)).collect();
    let swapped_product = pts.iter().map(|&y| f1.cdf(y) * f0.cdf(y)).collect();
    let witness = pts
        .iter()
        .map(|&y| (y, (f0.cdf(y) - f1.cdf(y)).abs()))
        .filter(|&(_, d)| d > 0.0)
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        });
    NonUniquenessDemo {
        f0: f0.clone(),
        f1: f1.clone(),
        grid: grid.clone(),
        product,
        swapped_product,
        witness,
    }
}
