//! Exact s-ordered star products of polynomial symbols.

use num_complex::Complex;
use num_rational::Rational64;
use phasespace::*;

fn show(f: &PolySymbol<Rational64>) -> String {
    let terms: Vec<String> = f
        .terms()
        .map(|(&(i, j), c)| {
            let coeff = match (c.re == 0.into(), c.im == 0.into()) {
                (_, true) => format!("{}", c.re),
                (true, false) => format!("{}i", c.im),
                _ => format!("({} + {}i)", c.re, c.im),
            };
            let q = match i {
                0 => String::new(),
                1 => " q".into(),
                _ => format!(" q^{i}"),
            };
            let p = match j {
                0 => String::new(),
                1 => " p".into(),
                _ => format!(" p^{j}"),
            };
            format!("{coeff}{q}{p}")
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn main() -> Result<()> {
    let half = Complex::new(Rational64::new(1, 2), Rational64::from(0));
    let (q, p) = (PolySymbol::<Rational64>::q(), PolySymbol::<Rational64>::p());
    let hbar = Rational64::from(1);
    for s in [-1, 0, 1].map(Rational64::from) {
        let qp = star_poly(&q, &p, s, hbar)?;
        let pq = star_poly(&p, &q, s, hbar)?;
        println!("s = {s:>2}:  q⋆p = {:<16} q⋆p - p⋆q = {}", show(&qp), show(&qp.sub(&pq)));
    }
    let h = PolySymbol::monomial(0, 2, half)?.add(&PolySymbol::monomial(2, 0, half)?);
    for s in [-1, 0, 1].map(Rational64::from) {
        println!("s = {s:>2}:  H⋆H = {}", show(&star_poly(&h, &h, s, hbar)?));
    }
    Ok(())
}
