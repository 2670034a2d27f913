//! Serde helpers that keep ±∞ and NaN representable in JSON by writing
//! them as the strings "Infinity", "-Infinity" and "NaN".

use serde::de::Error;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Num(f64),
    Text(String),
}

fn to_repr(v: f64) -> Repr {
    if v.is_nan() {
        Repr::Text("NaN".into())
    } else if v.is_infinite() {
        Repr::Text(if v > 0.0 { "Infinity" } else { "-Infinity" }.into())
    } else {
        Repr::Num(v)
    }
}

fn from_repr<E: Error>(r: Repr) -> Result<f64, E> {
    match r {
        Repr::Num(v) => Ok(v),
        Repr::Text(s) => match s.as_str() {
            "NaN" => Ok(f64::NAN),
            "Infinity" => Ok(f64::INFINITY),
            "-Infinity" => Ok(f64::NEG_INFINITY),
            other => Err(E::custom(format!("invalid number '{other}'"))),
        },
    }
}

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    to_repr(*v).serialize(s)
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    from_repr(Repr::deserialize(d)?)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|x| to_repr(*x)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Repr>::deserialize(d)?.into_iter().map(from_repr).collect()
    }
}

#[cfg(test)]
mod tests {
    #[derive(Debug, PartialEq, serde::Serialize, serde::Deserialize)]
    struct Probe {
        #[serde(with = "super")]
        x: f64,
        #[serde(with = "super::vec")]
        v: Vec<f64>,
    }

    #[test]
    fn round_trip() {
        let p = Probe {
            x: f64::NEG_INFINITY,
            v: vec![1.5, f64::INFINITY, 0.0],
        };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"x":"-Infinity","v":[1.5,"Infinity",0.0]}"#);
        assert_eq!(serde_json::from_str::<Probe>(&s).unwrap(), p);
        let nan: Probe = serde_json::from_str(r#"{"x":"NaN","v":[]}"#).unwrap();
        assert!(nan.x.is_nan());
    }
}
