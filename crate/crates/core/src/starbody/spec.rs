//! Text grammar for bodies.
//!
//! ```text
//! lq:n=<int>,q=<float|inf>
//! orlicz:n=<int>,M=poly(<q>)
//! qsum:left=(<spec>),right=(<spec>),q=<float>
//! image:T=<row-major floats>
//! synth2d:file=<path>
//! dilate:s=<float>,body=(<spec>)
//! ```

use super::{BodyKind, OrliczFunction, StarBody, Synthetic2d};
use crate::error::{Error, Result};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Splits `a=1,b=(x,y),c=2` at top-level commas.
fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::arg(format!("unbalanced parentheses in '{s}'")));
                }
            }
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return Err(Error::arg(format!("unbalanced parentheses in '{s}'")));
    }
    out.push(&s[start..]);
    Ok(out)
}

fn strip_parens(s: &str) -> &str {
    let t = s.trim();
    if (t.starts_with('(') && t.ends_with(')')) || (t.starts_with('[') && t.ends_with(']')) {
        &t[1..t.len() - 1]
    } else {
        t
    }
}

struct Fields<'a> {
    production: &'static str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(production: &'static str, body: &'a str) -> Result<Self> {
        let mut pairs = Vec::new();
        for item in split_top(body)? {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                Error::arg(format!("expected key=value in '{item}' (grammar: {production})"))
            })?;
            pairs.push((k.trim(), v.trim()));
        }
        Ok(Fields { production, pairs })
    }

    fn get(&self, key: &str) -> Result<&'a str> {
        self.pairs
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::arg(format!("missing '{key}' (grammar: {})", self.production)))
    }

    fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        for (k, _) in &self.pairs {
            if !allowed.contains(k) {
                return Err(Error::arg(format!(
                    "unknown key '{k}' (grammar: {})",
                    self.production
                )));
            }
        }
        Ok(())
    }

    fn float(&self, key: &str) -> Result<f64> {
        let v = self.get(key)?;
        parse_float(v).ok_or_else(|| {
            Error::arg(format!("'{key}={v}' is not a number (grammar: {})", self.production))
        })
    }

    fn int(&self, key: &str) -> Result<usize> {
        let v = self.get(key)?;
        v.parse().map_err(|_| {
            Error::arg(format!("'{key}={v}' is not an integer (grammar: {})", self.production))
        })
    }
}

fn parse_float(v: &str) -> Option<f64> {
    match v.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        s => s.parse::<f64>().ok().filter(|x| x.is_finite()),
    }
}

const LQ: &str = "lq:n=<int>,q=<float|inf>";
const ORLICZ: &str = "orlicz:n=<int>,M=poly(<q>)";
const QSUM: &str = "qsum:left=(<spec>),right=(<spec>),q=<float>";
const IMAGE: &str = "image:T=<row-major floats>";
const SYNTH: &str = "synth2d:file=<path>";
const DILATE: &str = "dilate:s=<float>,body=(<spec>)";

impl StarBody {
    /// Parses a body specification; see the module documentation.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').ok_or_else(|| {
            Error::arg(format!(
                "body spec '{spec}' lacks a kind prefix; expected one of {LQ} | {ORLICZ} | {QSUM} | {IMAGE} | {SYNTH} | {DILATE}"
            ))
        })?;
        match kind.trim() {
            "lq" => {
                let f = Fields::parse(LQ, rest)?;
                f.check_keys(&["n", "q"])?;
                StarBody::lq(f.int("n")?, f.float("q")?)
            }
            "orlicz" => {
                let f = Fields::parse(ORLICZ, rest)?;
                f.check_keys(&["n", "M"])?;
                let m = f.get("M")?;
                let q = m
                    .strip_prefix("poly")
                    .map(strip_parens)
                    .and_then(parse_float)
                    .ok_or_else(|| Error::arg(format!("bad Orlicz function '{m}' (grammar: {ORLICZ})")))?;
                StarBody::orlicz(f.int("n")?, OrliczFunction::power(q)?)
            }
            "qsum" => {
                let f = Fields::parse(QSUM, rest)?;
                f.check_keys(&["left", "right", "q"])?;
                let left = StarBody::parse(strip_parens(f.get("left")?))?;
                let right = StarBody::parse(strip_parens(f.get("right")?))?;
                StarBody::qsum(left, right, f.float("q")?)
            }
            "image" => {
                let v = rest
                    .trim()
                    .strip_prefix("T=")
                    .ok_or_else(|| Error::arg(format!("missing 'T' (grammar: {IMAGE})")))?;
                let entries = strip_parens(v)
                    .split([',', ';', ' '])
                    .filter(|s| !s.is_empty())
                    .map(|s| {
                        parse_float(s).ok_or_else(|| {
                            Error::arg(format!("bad matrix entry '{s}' (grammar: {IMAGE})"))
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                StarBody::image(entries)
            }
            "synth2d" => {
                let f = Fields::parse(SYNTH, rest)?;
                f.check_keys(&["file"])?;
                Ok(StarBody::synthetic2d(Synthetic2d::from_csv(Path::new(f.get("file")?))?))
            }
            "dilate" => {
                let f = Fields::parse(DILATE, rest)?;
                f.check_keys(&["s", "body"])?;
                StarBody::parse(strip_parens(f.get("body")?))?.dilate(f.float("s")?)
            }
            other => Err(Error::arg(format!(
                "unknown body kind '{other}'; expected one of {LQ} | {ORLICZ} | {QSUM} | {IMAGE} | {SYNTH} | {DILATE}"
            ))),
        }
    }

    /// Canonical specification string; `parse(spec()) == self`.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        "inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for StarBody {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            BodyKind::Lq { q } => write!(out, "lq:n={},q={}", self.n, fmt_float(*q)),
            BodyKind::LInf => write!(out, "lq:n={},q=inf", self.n),
            BodyKind::Orlicz { m: OrliczFunction::Power(q) } => {
                write!(out, "orlicz:n={},M=poly({})", self.n, fmt_float(*q))
            }
            BodyKind::QSum { left, right, q } => {
                write!(out, "qsum:left=({left}),right=({right}),q={}", fmt_float(*q))
            }
            BodyKind::Image { t, .. } => {
                let entries: Vec<String> = t.iter().map(|v| fmt_float(*v)).collect();
                write!(out, "image:T={}", entries.join(","))
            }
            BodyKind::Synthetic2d(s) => match s.source() {
                Some(p) => write!(out, "synth2d:file={}", p.display()),
                None => write!(out, "synth2d:file=<in-memory>"),
            },
            BodyKind::Dilated { inner, s } => write!(out, "dilate:s={},body=({inner})", fmt_float(*s)),
        }
    }
}

impl FromStr for StarBody {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        StarBody::parse(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_every_production() {
        let b = StarBody::parse("lq:n=3,q=inf").unwrap();
        assert_eq!(b.kind(), &BodyKind::LInf);
        assert_eq!(b.spec(), "lq:n=3,q=inf");
        let b = StarBody::parse("orlicz:n=4,M=poly(4)").unwrap();
        assert_eq!(b.spec(), "orlicz:n=4,M=poly(4)");
        let b = StarBody::parse("qsum:left=(lq:n=3,q=2),right=(lq:n=1,q=2),q=3").unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(b.spec(), "qsum:left=(lq:n=3,q=2),right=(lq:n=1,q=2),q=3");
        let b = StarBody::parse("image:T=2,0,0,0.5").unwrap();
        assert_eq!(b.spec(), "image:T=2,0,0,0.5");
        let b = StarBody::parse("dilate:s=2,body=(lq:n=2,q=1)").unwrap();
        assert_eq!(b.minkowski(&[1.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn synth2d_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let w = [0.25, 0.0, 0.25, 0.0, 0.25, 0.0, 0.25, 0.0];
        std::fs::write(&path, super::super::synth::measure_csv(&w, 0.5)).unwrap();
        let spec = format!("synth2d:file={}", path.display());
        let b = StarBody::parse(&spec).unwrap();
        assert_eq!(b.spec(), spec);
        assert!(b.minkowski(&[1.0, 0.0]).unwrap() > 0.0);
    }

    #[test]
    fn usage_errors_name_the_production() {
        for (bad, needle) in [
            ("lq:n=3", "lq:n=<int>"),
            ("lq:n=3,q=abc", "lq:n=<int>"),
            ("orlicz:n=4,M=exp(2)", "orlicz:"),
            ("foo:n=1", "unknown body kind"),
            ("lq", "kind prefix"),
            ("qsum:left=(lq:n=3,q=2,right=(lq:n=1,q=2),q=3", "unbalanced"),
        ] {
            match StarBody::parse(bad) {
                Err(Error::Argument(m)) => assert!(m.contains(needle), "{bad}: {m}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    fn spec_strategy() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (1usize..6, prop_oneof![Just("1".to_string()), Just("2.5".into()), Just("inf".into()), Just("4".into())])
                .prop_map(|(n, q)| format!("lq:n={n},q={q}")),
            (1usize..6, 1u32..6).prop_map(|(n, q)| format!("orlicz:n={n},M=poly({q})")),
            Just("image:T=1,0.5,0,2".to_string()),
        ];
        leaf.prop_recursive(2, 6, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone(), 1u32..5)
                    .prop_map(|(a, b, q)| format!("qsum:left=({a}),right=({b}),q={q}")),
                (inner, 1u32..4).prop_map(|(a, s)| format!("dilate:s={s},body=({a})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn canonical_round_trip(spec in spec_strategy()) {
            let body = StarBody::parse(&spec).unwrap();
            let canon = body.spec();
            let again = StarBody::parse(&canon).unwrap();
            prop_assert_eq!(&again, &body);
            prop_assert_eq!(again.spec(), canon);
        }
    }
}
