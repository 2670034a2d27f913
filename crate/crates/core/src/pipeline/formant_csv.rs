use std::path::Path;

use super::CliError;
use crate::formants::{FormantTrack, POINTS_PER_TRACK};
use crate::harmony::{Vowel, VowelMeasurement};

/// Missing-value marker.
pub const NA: &str = "NA";

/// Formats `x` with at most 6 significant digits, trailing zeros removed.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // shortest representation of the 6-digit rounding
    format!("{}", round_sig6(x))
}

/// Rounds to 6 significant digits.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// One vowel of one token, as written by `extract`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormantCsvRow {
    pub token_id: String,
    pub word: String,
    /// 1-based position within the token.
    pub vowel_index: usize,
    pub vowel_label: Vowel,
    pub start: f64,
    pub end: f64,
    pub mean_f1: Option<f64>,
    pub mean_f2: Option<f64>,
    pub mean_f3: Option<f64>,
    pub f1_points: [Option<f64>; POINTS_PER_TRACK],
    pub reliable: bool,
}

pub fn header() -> Vec<String> {
    let mut h: Vec<String> = [
        "token_id",
        "word",
        "vowel_index",
        "vowel_label",
        "start",
        "end",
        "mean_f1",
        "mean_f2",
        "mean_f3",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend((1..=POINTS_PER_TRACK).map(|k| format!("f1_p{k}")));
    h.push("reliable".into());
    h
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| NA.to_string(), format_sig6)
}

impl FormantCsvRow {
    /// Row for a measured track; numbers are rounded to what the CSV keeps.
    pub fn from_track(track: &FormantTrack, word: &str, vowel_index: usize) -> Self {
        let r = |x: Option<f64>| x.map(round_sig6);
        let mut f1_points = [None; POINTS_PER_TRACK];
        for (slot, v) in f1_points.iter_mut().zip(track.f1_points()) {
            *slot = r(v);
        }
        Self {
            token_id: track.segment.token_id.clone(),
            word: word.to_string(),
            vowel_index,
            vowel_label: track.segment.label,
            start: round_sig6(track.segment.start),
            end: round_sig6(track.segment.end),
            mean_f1: r(track.mean_f1),
            mean_f2: r(track.mean_f2),
            mean_f3: r(track.mean_f3),
            f1_points,
            reliable: track.reliable,
        }
    }

    pub fn measurement(&self) -> VowelMeasurement {
        VowelMeasurement {
            token_id: self.token_id.clone(),
            vowel_index: self.vowel_index,
            label: self.vowel_label,
            start: self.start,
            end: self.end,
            mean_f1: self.mean_f1,
            mean_f2: self.mean_f2,
            mean_f3: self.mean_f3,
            reliable: self.reliable,
        }
    }

    fn record(&self) -> Vec<String> {
        let mut rec = vec![
            self.token_id.clone(),
            self.word.clone(),
            self.vowel_index.to_string(),
            self.vowel_label.symbol().to_string(),
            format_sig6(self.start),
            format_sig6(self.end),
            opt(self.mean_f1),
            opt(self.mean_f2),
            opt(self.mean_f3),
        ];
        rec.extend(self.f1_points.iter().map(|&p| opt(p)));
        rec.push(self.reliable.to_string());
        rec
    }

    fn parse(rec: &csv::StringRecord, line: usize) -> Result<Self, String> {
        let field = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| -> Result<f64, String> {
            field(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("line {line}: column {} is not a number", header()[i]))
        };
        let opt_num = |i: usize| -> Result<Option<f64>, String> {
            if field(i) == NA {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        let mut f1_points = [None; POINTS_PER_TRACK];
        for (k, slot) in f1_points.iter_mut().enumerate() {
            *slot = opt_num(9 + k)?;
        }
        Ok(Self {
            token_id: field(0).to_string(),
            word: field(1).to_string(),
            vowel_index: field(2)
                .parse()
                .map_err(|_| format!("line {line}: bad vowel_index '{}'", field(2)))?,
            vowel_label: field(3).parse().map_err(|e| format!("line {line}: {e}"))?,
            start: num(4)?,
            end: num(5)?,
            mean_f1: opt_num(6)?,
            mean_f2: opt_num(7)?,
            mean_f3: opt_num(8)?,
            f1_points,
            reliable: field(9 + POINTS_PER_TRACK)
                .parse()
                .map_err(|_| format!("line {line}: reliable must be true or false"))?,
        })
    }
}

pub fn write_formant_csv(w: impl std::io::Write, rows: &[FormantCsvRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(header())?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_formant_csv(r: impl std::io::Read) -> Result<Vec<FormantCsvRow>, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let found: Vec<String> = rdr
        .headers()
        .map_err(|e| CliError::Input(format!("formant CSV: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header() {
        return Err(CliError::Input(format!(
            "formant CSV header must be '{}'",
            header().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("formant CSV: {e}")))?;
        rows.push(FormantCsvRow::parse(&rec, k + 2).map_err(CliError::Input)?);
    }
    Ok(rows)
}

pub fn save_formant_csv(path: &Path, rows: &[FormantCsvRow]) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_formant_csv(std::io::BufWriter::new(file), rows).map_err(|e| CliError::csv(path, e))
}

pub fn load_formant_csv(path: &Path) -> Result<Vec<FormantCsvRow>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    read_formant_csv(std::io::BufReader::new(file))
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_sig6(512.3456789), "512.346");
        assert_eq!(format_sig6(700.0), "700");
        assert_eq!(format_sig6(0.123456789), "0.123457");
        assert_eq!(format_sig6(1234567.0), "1234570");
        assert_eq!(format_sig6(-0.5), "-0.5");
        assert_eq!(format_sig6(0.0), "0");
    }

    fn arb_opt() -> impl Strategy<Value = Option<f64>> {
        prop_oneof![Just(None), (1.0f64..6000.0).prop_map(|v| Some(round_sig6(v)))]
    }

    prop_compose! {
        fn arb_row()(
            token in "[a-z0-9_]{1,8}",
            word in "[a-zA-Z]{1,6}",
            idx in 1usize..5,
            label in 0usize..8,
            start in 0.0f64..10.0,
            len in 0.01f64..1.0,
            means in proptest::collection::vec(arb_opt(), 3),
            points in proptest::collection::vec(arb_opt(), POINTS_PER_TRACK),
            reliable in any::<bool>(),
        ) -> FormantCsvRow {
            let mut f1_points = [None; POINTS_PER_TRACK];
            f1_points.copy_from_slice(&points);
            FormantCsvRow {
                token_id: token,
                word,
                vowel_index: idx,
                vowel_label: Vowel::ALL[label],
                start: round_sig6(start),
                end: round_sig6(start + len),
                mean_f1: means[0],
                mean_f2: means[1],
                mean_f3: means[2],
                f1_points,
                reliable,
            }
        }
    }

    proptest! {
        #[test]
        fn parse_emit_round_trip(rows in proptest::collection::vec(arb_row(), 0..20)) {
            let mut buf = Vec::new();
            write_formant_csv(&mut buf, &rows).unwrap();
            prop_assert_eq!(read_formant_csv(buf.as_slice()).unwrap(), rows);
        }

        #[test]
        fn rounding_is_idempotent(x in -1e7f64..1e7) {
            let r = round_sig6(x);
            prop_assert_eq!(round_sig6(r), r);
            prop_assert_eq!(format_sig6(r).parse::<f64>().unwrap(), r);
            prop_assert!((r - x).abs() <= 5e-6 * x.abs());
        }
    }

    #[test]
    fn header_is_checked() {
        let text = "token_id,word\nx,y\n";
        assert!(matches!(read_formant_csv(text.as_bytes()), Err(CliError::Input(_))));
    }

    #[test]
    fn na_and_bad_numbers() {
        let mut buf = Vec::new();
        let row = FormantCsvRow {
            token_id: "t".into(),
            word: "w".into(),
            vowel_index: 1,
            vowel_label: Vowel::OpenE,
            start: 0.1,
            end: 0.3,
            mean_f1: None,
            mean_f2: Some(1800.0),
            mean_f3: None,
            f1_points: [None; POINTS_PER_TRACK],
            reliable: false,
        };
        write_formant_csv(&mut buf, std::slice::from_ref(&row)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("t,w,1,E,0.1,0.3,NA,1800,NA,NA"));
        let broken = text.replace("1800", "18OO");
        assert!(read_formant_csv(broken.as_bytes()).is_err());
    }
}
