use super::decl::{Letter, VarClass};
use super::poly::{MonomialKey, TracePolynomial};
use super::word::Word;
use num_complex::Complex64;
use std::fmt;

pub(crate) fn letter_string(l: &Letter) -> String {
    match l.class {
        VarClass::X => format!("x{}", l.index),
        VarClass::XPrime => format!("xp{}", l.index),
        VarClass::Y(slot) => {
            if l.index == 1 {
                format!("y{slot}")
            } else {
                format!("y{slot}_{}", l.index)
            }
        }
        VarClass::S(slot) => {
            if l.index == 1 {
                format!("s{slot}")
            } else {
                format!("s{slot}_{}", l.index)
            }
        }
    }
}

fn word_string(w: &Word) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < w.0.len() {
        let mut run = 1;
        while i + run < w.0.len() && w.0[i + run] == w.0[i] {
            run += 1;
        }
        let base = letter_string(&w.0[i]);
        parts.push(if run == 1 { base } else { format!("{base}^{run}") });
        i += run;
    }
    parts.join("*")
}

fn monomial_string(k: &MonomialKey) -> String {
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < k.factors.len() {
        let mut run = 1;
        while i + run < k.factors.len() && k.factors[i + run] == k.factors[i] {
            run += 1;
        }
        let base = format!("tr({})", word_string(k.factors[i].word()));
        parts.push(if run == 1 { base } else { format!("{base}^{run}") });
        i += run;
    }
    if !k.outer.is_empty() {
        parts.push(word_string(&k.outer));
    }
    parts.join("*")
}

fn fmt_real(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Coefficient rendering; `1`/`-1` in front of a nonunit monomial collapse
/// onto the joining sign.
fn coeff_string(c: Complex64) -> (bool, Option<String>) {
    if c.im.abs() <= 1e-15 {
        let neg = c.re < 0.0;
        let a = c.re.abs();
        if (a - 1.0).abs() <= 1e-15 {
            (neg, None)
        } else {
            (neg, Some(fmt_real(a)))
        }
    } else if c.re.abs() <= 1e-15 {
        let neg = c.im < 0.0;
        let a = c.im.abs();
        if (a - 1.0).abs() <= 1e-15 {
            (neg, Some("i".to_string()))
        } else {
            (neg, Some(format!("{}*i", fmt_real(a))))
        }
    } else {
        (false, Some(format!("({}+{}*i)", fmt_real(c.re), fmt_real(c.im))))
    }
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            let (neg, coeff) = coeff_string(*c);
            let mono = monomial_string(k);
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (coeff, mono.is_empty()) {
                (Some(cs), true) => write!(f, "{cs}")?,
                (Some(cs), false) => write!(f, "{cs}*{mono}")?,
                (None, true) => write!(f, "1")?,
                (None, false) => write!(f, "{mono}")?,
            }
        }
        Ok(())
    }
}
