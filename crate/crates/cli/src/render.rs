//! Report rendering. Text mode rounds to six decimals; machine mode writes
//! `key=value` lines at full precision (shortest round-trip form).

use std::fmt::Write as _;
use std::io::{self, Write};

use mixtura::scenarios::{ScenarioReport, StateValue};
use mixtura::{Ket, Matrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Machine,
}

#[derive(Debug, Clone)]
pub enum Value {
    Real(f64),
    Int(usize),
    Text(String),
    Vector(Vec<C64>),
    Matrix(Matrix),
    Reals(Vec<f64>),
}

/// Ordered list of named values.
#[derive(Debug, Clone, Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Value) -> &mut Self {
        self.entries.push((key.into(), value));
        self
    }

    pub fn real(&mut self, key: impl Into<String>, x: f64) -> &mut Self {
        self.push(key, Value::Real(x))
    }

    pub fn int(&mut self, key: impl Into<String>, n: usize) -> &mut Self {
        self.push(key, Value::Int(n))
    }

    pub fn text(&mut self, key: impl Into<String>, s: impl Into<String>) -> &mut Self {
        self.push(key, Value::Text(s.into()))
    }

    pub fn ket(&mut self, key: impl Into<String>, k: &Ket) -> &mut Self {
        self.push(key, Value::Vector(k.amps().to_vec()))
    }

    pub fn matrix(&mut self, key: impl Into<String>, m: &Matrix) -> &mut Self {
        self.push(key, Value::Matrix(m.clone()))
    }

    pub fn reals(&mut self, key: impl Into<String>, xs: &[f64]) -> &mut Self {
        self.push(key, Value::Reals(xs.to_vec()))
    }

    pub fn kets(&mut self, key: &str, kets: &[Ket]) -> &mut Self {
        self.int(format!("{key}.count"), kets.len());
        for (j, k) in kets.iter().enumerate() {
            self.ket(format!("{key}.{j}"), k);
        }
        self
    }

    pub fn scenario(report: &ScenarioReport) -> Self {
        let mut r = Self::new();
        r.text("scenario", report.scenario);
        for (label, value) in &report.findings {
            r.real(format!("finding.{label}"), *value);
        }
        r.text("verdict", report.verdict.name());
        r.text("verdict_rule", report.verdict_rule.clone());
        for (label, state) in &report.states {
            match state {
                StateValue::Ket(k) => r.ket(format!("state.{label}"), k),
                StateValue::Density(d) => r.matrix(format!("state.{label}"), d.matrix()),
            };
        }
        r
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        let rendered = match format {
            Format::Text => self.text_form(),
            Format::Machine => self.machine_form(),
        };
        out.write_all(rendered.as_bytes())
    }

    fn text_form(&self) -> String {
        let mut s = String::new();
        for (key, value) in &self.entries {
            let _ = match value {
                Value::Real(x) => writeln!(s, "{key}: {}", short_real(*x)),
                Value::Int(n) => writeln!(s, "{key}: {n}"),
                Value::Text(t) => writeln!(s, "{key}: {t}"),
                Value::Reals(xs) => {
                    writeln!(s, "{key}: [{}]", xs.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", "))
                }
                Value::Vector(v) => {
                    writeln!(s, "{key}: ({})", v.iter().map(|z| complex6(*z)).collect::<Vec<_>>().join(", "))
                }
                Value::Matrix(m) => {
                    let _ = writeln!(s, "{key} ({}x{}):", m.rows(), m.cols());
                    for i in 0..m.rows() {
                        let row: Vec<String> = (0..m.cols()).map(|j| complex6(m.get(i, j))).collect();
                        let _ = writeln!(s, "  {}", row.join("  "));
                    }
                    Ok(())
                }
            };
        }
        s
    }

    fn machine_form(&self) -> String {
        let mut s = String::new();
        for (key, value) in &self.entries {
            let _ = match value {
                Value::Real(x) => writeln!(s, "{key}={x:?}"),
                Value::Int(n) => writeln!(s, "{key}={n}"),
                Value::Text(t) => writeln!(s, "{key}={}", t.replace('\n', " ")),
                Value::Reals(xs) => {
                    writeln!(s, "{key}={}", xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","))
                }
                Value::Vector(v) => {
                    writeln!(s, "{key}.dim={}", v.len()).and_then(|_| writeln!(s, "{key}.data={}", flat(v)))
                }
                Value::Matrix(m) => writeln!(s, "{key}.shape={}x{}", m.rows(), m.cols())
                    .and_then(|_| writeln!(s, "{key}.data={}", flat(m.data()))),
            };
        }
        s
    }
}

fn short_real(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:.3e}")
    } else {
        format!("{x:.6}")
    }
}

fn complex6(z: C64) -> String {
    // rounding to six places can print -0.000000; drop the sign
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    format!("{:+.6}{:+.6}i", clean(z.re), clean(z.im))
}

fn flat(v: &[C64]) -> String {
    v.iter().map(|z| format!("{:?},{:?}", z.re, z.im)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(r: &Report, f: Format) -> String {
        let mut out = Vec::new();
        r.write(f, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn matrix_forms() {
        let mut r = Report::new();
        r.matrix("rho", &Matrix::diag(&[0.5, 0.5])).real("purity", 0.5);
        assert_eq!(
            render(&r, Format::Text),
            "rho (2x2):\n  +0.500000+0.000000i  +0.000000+0.000000i\n  +0.000000+0.000000i  +0.500000+0.000000i\npurity: 0.500000\n"
        );
        assert_eq!(
            render(&r, Format::Machine),
            "rho.shape=2x2\nrho.data=0.5,0.0,0.0,0.0,0.0,0.0,0.5,0.0\npurity=0.5\n"
        );
    }

    #[test]
    fn machine_reals_round_trip() {
        let x = 0.1 + 0.2;
        let mut r = Report::new();
        r.real("x", x);
        let line = render(&r, Format::Machine);
        let parsed: f64 = line.trim().strip_prefix("x=").unwrap().parse().unwrap();
        assert_eq!(parsed.to_bits(), x.to_bits());
    }

    #[test]
    fn tiny_values_in_text() {
        assert_eq!(short_real(1.5e-16), "1.500e-16");
        assert_eq!(short_real(0.0), "0.000000");
        assert_eq!(complex6(C64::new(-1e-9, 0.25)), "+0.000000+0.250000i");
    }
}
