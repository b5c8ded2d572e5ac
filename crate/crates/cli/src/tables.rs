//! The entanglement-swapping tables and the Pauli-on-Bell map, as plain text.

use std::fmt::Write as _;

use cmqea_core::oracle::{pauli_bell_map, swap_table};
use cmqea_core::{BellLabel, PauliLabel};

use crate::report::sig12;

/// Cells below this are treated as impossible and left out.
const SHOW_THRESHOLD: f64 = 1e-12;

pub fn render_tables() -> String {
    let mut out = String::new();
    out.push_str("# Entanglement swapping\n");
    out.push_str("# M on (A1,B1) and N on (A2,B2); P measured on (A1,A2), Q on (B1,B2)\n");
    for m in BellLabel::ALL {
        for n in BellLabel::ALL {
            let table = swap_table(m, n);
            let _ = writeln!(out, "swap M={m} N={n}");
            for (&(p, q), prob) in table.joint.support(SHOW_THRESHOLD) {
                let _ = writeln!(out, "  P={p} Q={q} p={}", sig12(prob));
            }
        }
    }
    out.push('\n');
    out.push_str("# Pauli applied to the first qubit of a Bell pair\n");
    for p in PauliLabel::ALL {
        for m in BellLabel::ALL {
            let _ = writeln!(out, "{} {m} -> {}", p.name(), pauli_bell_map(p, m));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sixteen_tables_with_four_rows_each() {
        let text = render_tables();
        assert_eq!(text.lines().filter(|l| l.starts_with("swap ")).count(), 16);
        assert_eq!(text.lines().filter(|l| l.ends_with("p=0.25")).count(), 64);
        assert_eq!(text.lines().filter(|l| l.contains(" -> ")).count(), 16);
        assert!(text.contains("I Phi+ -> Phi+\n"));
        assert!(text.contains("iY Phi+ -> Psi-\n"));
        assert_eq!(text, render_tables());
    }
}
