//! Plain-text table writers.

use std::io::Write;

/// Write `x,value` rows with 17 significant digits.
pub fn write_xy_csv<W: Write>(mut w: W, rows: impl IntoIterator<Item = (f64, f64)>) -> std::io::Result<()> {
    writeln!(w, "x,value")?;
    for (x, v) in rows {
        writeln!(w, "{x:.16e},{v:.16e}")?;
    }
    Ok(())
}

/// Write a table with a header row; values use 17 significant digits.
pub fn write_table_csv<W: Write>(mut w: W, columns: &[String], rows: &[Vec<f64>]) -> std::io::Result<()> {
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Midpoints `(l + 1/2)/n`.
pub fn midpoints(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |l| (l as f64 + 0.5) / n as f64)
}
