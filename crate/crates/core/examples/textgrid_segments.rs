//! Builds a TextGrid, writes it in Praat's long text format, parses it
//! back and pulls out the vowel intervals.
//!
//! cargo run --example textgrid_segments

use harmonium::textgrid::{
    extract_vowel_segments, parse_textgrid, serialize_textgrid, Interval, IntervalTier,
};
use harmonium::{TextGrid, VowelInventory};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let labels = [("", 0.0, 0.05), ("E", 0.05, 0.25), ("t", 0.25, 0.30), ("i", 0.30, 0.50), ("??", 0.50, 0.55)];
    let grid = TextGrid {
        xmin: 0.0,
        xmax: 0.55,
        tiers: vec![IntervalTier {
            name: "phones".into(),
            xmin: 0.0,
            xmax: 0.55,
            intervals: labels
                .iter()
                .map(|&(text, xmin, xmax)| Interval { xmin, xmax, text: text.into() })
                .collect(),
        }],
    };

    let text = serialize_textgrid(&grid)?;
    print!("{text}");
    let parsed = parse_textgrid(&text)?;
    assert_eq!(parsed, grid);

    let found = extract_vowel_segments(&parsed, "phones", &VowelInventory::default(), &["t".to_string()], "tok1")?;
    for s in &found.segments {
        println!("vowel {} from {:.2} s to {:.2} s", s.label, s.start, s.end);
    }
    for w in &found.warnings {
        println!("warning: interval {} '{}': {}", w.interval, w.label, w.reason);
    }
    Ok(())
}
