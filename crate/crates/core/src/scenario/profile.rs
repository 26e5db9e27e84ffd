//! Closed-form spatial profiles used for initial data, forcing, and
//! supplied extensions.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Const(f64),
    /// `base + amp * exp(-((x-cx)² + (y-cy)²) / width²)`; `cy` is ignored in 1D.
    Gauss { base: f64, amp: f64, cx: f64, cy: f64, width: f64 },
    /// `left` for `x < x0`, `right` otherwise.
    Step { x0: f64, left: f64, right: f64 },
    /// `left + (right - left) * (1 + tanh((x - x0) / width)) / 2`.
    Tanh { x0: f64, width: f64, left: f64, right: f64 },
    /// `base + amp * sin(2π k x)`.
    Sine { base: f64, amp: f64, k: f64 },
    /// Piecewise-linear samples at equally spaced nodes over `[0, lx]`.
    Table(Vec<f64>),
}

impl Profile {
    /// Evaluates at `(x, y)`; `lx` scales table abscissae.
    pub fn eval(&self, x: f64, y: f64, lx: f64) -> f64 {
        match self {
            Profile::Const(v) => *v,
            Profile::Gauss { base, amp, cx, cy, width } => {
                let r2 = (x - cx).powi(2) + if y.is_nan() { 0.0 } else { (y - cy).powi(2) };
                base + amp * (-r2 / (width * width)).exp()
            }
            Profile::Step { x0, left, right } => {
                if x < *x0 {
                    *left
                } else {
                    *right
                }
            }
            Profile::Tanh { x0, width, left, right } => left + (right - left) * 0.5 * (1.0 + ((x - x0) / width).tanh()),
            Profile::Sine { base, amp, k } => base + amp * (2.0 * std::f64::consts::PI * k * x).sin(),
            Profile::Table(vals) => {
                if vals.len() == 1 {
                    return vals[0];
                }
                let s = (x / lx).clamp(0.0, 1.0) * (vals.len() - 1) as f64;
                let k = (s.floor() as usize).min(vals.len() - 2);
                let t = s - k as f64;
                vals[k] * (1.0 - t) + vals[k + 1] * t
            }
        }
    }

    pub fn parse(text: &str) -> Result<Profile> {
        let text = text.trim();
        let bad = |m: String| Error::InvalidParams(m);
        let Some(open) = text.find('(') else {
            return text
                .parse::<f64>()
                .map(Profile::Const)
                .map_err(|_| bad(format!("cannot parse profile '{text}'")));
        };
        if !text.ends_with(')') {
            return Err(bad(format!("unterminated profile '{text}'")));
        }
        let name = text[..open].trim();
        let inner = &text[open + 1..text.len() - 1];
        let args: Vec<f64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|a| a.trim().parse::<f64>().map_err(|_| bad(format!("bad number '{}' in '{text}'", a.trim()))))
                .collect::<Result<_>>()?
        };
        let want = |n: usize| -> Result<()> {
            if args.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{name}() takes {n} arguments, got {}", args.len())))
            }
        };
        let p = match name {
            "const" => {
                want(1)?;
                Profile::Const(args[0])
            }
            "gauss" => {
                want(5)?;
                Profile::Gauss { base: args[0], amp: args[1], cx: args[2], cy: args[3], width: args[4] }
            }
            "step" => {
                want(3)?;
                Profile::Step { x0: args[0], left: args[1], right: args[2] }
            }
            "tanh" => {
                want(4)?;
                Profile::Tanh { x0: args[0], width: args[1], left: args[2], right: args[3] }
            }
            "sine" => {
                want(3)?;
                Profile::Sine { base: args[0], amp: args[1], k: args[2] }
            }
            "table" => {
                if args.is_empty() {
                    return Err(bad("table() needs at least one value".into()));
                }
                Profile::Table(args)
            }
            other => return Err(bad(format!("unknown profile '{other}'"))),
        };
        if let Profile::Gauss { width, .. } | Profile::Tanh { width, .. } = &p {
            if !(*width > 0.0) {
                return Err(bad(format!("profile width must be positive in '{text}'")));
            }
        }
        Ok(p)
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Const(v) => write!(f, "const({v:?})"),
            Profile::Gauss { base, amp, cx, cy, width } => write!(f, "gauss({base:?}, {amp:?}, {cx:?}, {cy:?}, {width:?})"),
            Profile::Step { x0, left, right } => write!(f, "step({x0:?}, {left:?}, {right:?})"),
            Profile::Tanh { x0, width, left, right } => write!(f, "tanh({x0:?}, {width:?}, {left:?}, {right:?})"),
            Profile::Sine { base, amp, k } => write!(f, "sine({base:?}, {amp:?}, {k:?})"),
            Profile::Table(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
                write!(f, "table({})", parts.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for text in [
            "const(0.5)",
            "gauss(0.5, -0.25, 0.5, 0.5, 0.1)",
            "step(0.3, 1.0, 2.0)",
            "tanh(0.5, 0.05, 0.0, 1e-10)",
            "sine(1.0, 0.1, 2.0)",
            "table(0.0, 0.5, 1.0)",
        ] {
            let p = Profile::parse(text).unwrap();
            assert_eq!(Profile::parse(&p.to_string()).unwrap(), p);
        }
        assert_eq!(Profile::parse("0.25").unwrap(), Profile::Const(0.25));
    }

    #[test]
    fn rejects_malformed() {
        assert!(Profile::parse("gauss(1, 2)").is_err());
        assert!(Profile::parse("wiggle(1)").is_err());
        assert!(Profile::parse("const(1").is_err());
        assert!(Profile::parse("tanh(0.5, 0.0, 1, 2)").is_err());
    }

    #[test]
    fn table_interpolates() {
        let p = Profile::Table(vec![0.0, 1.0, 0.0]);
        assert_eq!(p.eval(0.25, 0.0, 1.0), 0.5);
        assert_eq!(p.eval(0.5, 0.0, 1.0), 1.0);
        assert_eq!(p.eval(1.0, 0.0, 1.0), 0.0);
    }
}
