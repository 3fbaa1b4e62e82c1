use std::fmt::Write;

use super::reduce::HomologyResult;

/// One instance of a Betti table.
pub struct BettiRow<'a> {
    pub instance: &'a str,
    pub homology: &'a HomologyResult,
}

/// CSV with columns `instance,dim,betti,torsion`; torsion factors are
/// joined by `;`.
pub fn betti_csv(rows: &[BettiRow<'_>]) -> String {
    let mut out = String::from("instance,dim,betti,torsion\n");
    for row in rows {
        for h in &row.homology.degrees {
            let torsion: Vec<String> = h.torsion.iter().map(|t| t.to_string()).collect();
            writeln!(out, "{},{},{},{}", row.instance, h.dim, h.betti, torsion.join(";")).expect("string write");
        }
    }
    out
}

/// Header line `dim rows cols`, then one line per row.
pub fn dump_matrix(dim: usize, m: &[Vec<i64>]) -> String {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = format!("{dim} {} {cols}\n", m.len());
    for row in m {
        let line: Vec<String> = row.iter().map(i64::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}
