use std::fmt::Write;

use super::{TextGrid, TextGridError};

/// Shortest decimal representation that reads back to the same `f64`.
fn time(t: f64) -> String {
    format!("{t}")
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Writes the long text format with Praat's indentation.
pub fn serialize_textgrid(grid: &TextGrid) -> Result<String, TextGridError> {
    grid.validate()?;
    let mut out = String::new();
    // writing to a String cannot fail
    let _ = write_grid(&mut out, grid);
    Ok(out)
}

fn write_grid(out: &mut String, grid: &TextGrid) -> std::fmt::Result {
    writeln!(out, "File type = \"ooTextFile\"")?;
    writeln!(out, "Object class = \"TextGrid\"")?;
    writeln!(out)?;
    writeln!(out, "xmin = {} ", time(grid.xmin))?;
    writeln!(out, "xmax = {} ", time(grid.xmax))?;
    writeln!(out, "tiers? <exists> ")?;
    writeln!(out, "size = {} ", grid.tiers.len())?;
    if grid.tiers.is_empty() {
        return Ok(());
    }
    writeln!(out, "item []: ")?;
    for (k, tier) in grid.tiers.iter().enumerate() {
        writeln!(out, "    item [{}]:", k + 1)?;
        writeln!(out, "        class = \"IntervalTier\" ")?;
        writeln!(out, "        name = {} ", quoted(&tier.name))?;
        writeln!(out, "        xmin = {} ", time(tier.xmin))?;
        writeln!(out, "        xmax = {} ", time(tier.xmax))?;
        writeln!(out, "        intervals: size = {} ", tier.intervals.len())?;
        for (j, iv) in tier.intervals.iter().enumerate() {
            writeln!(out, "        intervals [{}]:", j + 1)?;
            writeln!(out, "            xmin = {} ", time(iv.xmin))?;
            writeln!(out, "            xmax = {} ", time(iv.xmax))?;
            writeln!(out, "            text = {} ", quoted(&iv.text))?;
        }
    }
    Ok(())
}
