//! FCIDUMP reading and writing.
//!
//! Header `&FCI NORB=n,NELEC=m,MS2=s,...` closed by `&END` or `/`, followed
//! by `value i j k l` records with 1-based indices in chemists' notation.
//! `value i j 0 0` is a one-electron integral and `value 0 0 0 0` the core
//! energy. Records `value i 0 0 0` (orbital energies) are accepted and ignored.
//! Lines starting with `#` before the header are skipped.

use std::fmt::Write as _;
use std::path::Path;

use super::{EriSymmetry, IntegralModel, SourceTag, TwoElectronIntegrals};
use crate::error::{domain, Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.replace(['D', 'd'], "E").parse::<f64>().map_err(|_| parse_err(line, format!("non-numeric value '{tok}'")))
}

/// Parses FCIDUMP text into a symmetrized model.
pub fn parse_fcidump(text: &str) -> Result<IntegralModel> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut header = String::new();
    let mut header_start = 0;
    let mut closed = false;
    for (n, line) in lines.by_ref() {
        let t = line.trim();
        if header.is_empty() && (t.is_empty() || t.starts_with('#')) {
            continue;
        }
        if header_start == 0 {
            header_start = n;
            if !t.to_ascii_uppercase().starts_with("&FCI") {
                return Err(parse_err(n, "expected '&FCI' header"));
            }
        }
        let upper = t.to_ascii_uppercase();
        if let Some(pos) = upper.find("&END").or_else(|| upper.rfind('/')) {
            header.push_str(&t[..pos]);
            closed = true;
            break;
        }
        header.push_str(t);
        header.push(',');
    }
    if !closed {
        return Err(parse_err(header_start.max(1), "header not terminated by '&END' or '/'"));
    }
    // header starts with "&FCI"
    let body = &header[4..];
    let mut norb = None;
    let mut nelec = None;
    let mut ms2 = 0i64;
    let mut key = String::new();
    for tok in body.split([',', ' ', '\t']).filter(|s| !s.is_empty()) {
        let (k, v) = match tok.split_once('=') {
            Some((k, v)) => {
                key = k.trim().to_ascii_uppercase();
                (key.as_str(), v.trim())
            }
            None => (key.as_str(), tok.trim()),
        };
        if v.is_empty() {
            continue;
        }
        let int = |v: &str| v.parse::<i64>().map_err(|_| parse_err(header_start, format!("bad value for {k}: '{v}'")));
        match k {
            "NORB" => norb = Some(int(v)?),
            "NELEC" => nelec = Some(int(v)?),
            "MS2" => ms2 = int(v)?,
            "UHF" | "IUHF" if int(v)? != 0 => {
                return Err(parse_err(header_start, "unrestricted integrals are not supported"));
            }
            _ => {}
        }
    }
    let norb = norb.ok_or_else(|| parse_err(header_start, "missing NORB"))?;
    let nelec = nelec.ok_or_else(|| parse_err(header_start, "missing NELEC"))?;
    if norb <= 0 || norb as usize > crate::determinants::MAX_ORBITALS {
        return Err(parse_err(header_start, format!("unsupported NORB={norb}")));
    }
    if nelec < 0 || (nelec + ms2) % 2 != 0 || ms2.abs() > nelec {
        return Err(parse_err(header_start, format!("inconsistent NELEC={nelec}, MS2={ms2}")));
    }
    let m = norb as usize;
    let n_alpha = ((nelec + ms2) / 2) as usize;
    let n_beta = ((nelec - ms2) / 2) as usize;
    if n_alpha > m || n_beta > m {
        return Err(parse_err(header_start, "more electrons than spin-orbitals"));
    }

    let mut h: Vec<Option<f64>> = vec![None; m * m];
    let mut eri = TwoElectronIntegrals::new(m, EriSymmetry::Eightfold);
    let mut e_core = 0.0;
    for (n, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        if toks.len() != 5 {
            return Err(parse_err(n, format!("expected 'value i j k l', got {} fields", toks.len())));
        }
        let v = parse_value(toks[0], n)?;
        let mut idx = [0usize; 4];
        for (slot, tok) in idx.iter_mut().zip(&toks[1..]) {
            let i: i64 = tok.parse().map_err(|_| parse_err(n, format!("bad index '{tok}'")))?;
            if i < 0 || i > norb {
                return Err(parse_err(n, format!("index {i} outside [1, {norb}]")));
            }
            *slot = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => e_core = v,
            [i, 0, 0, 0] if i > 0 => {}
            [i, j, 0, 0] if i > 0 && j > 0 => {
                for (p, q) in [(i - 1, j - 1), (j - 1, i - 1)] {
                    if let Some(old) = h[p * m + q] {
                        if (old - v).abs() > 1e-12 {
                            return Err(parse_err(n, format!("h({i},{j}) conflicts with an earlier value")));
                        }
                    }
                    h[p * m + q] = Some(v);
                }
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                if let Some(old) = eri.insert(i - 1, j - 1, k - 1, l - 1, v) {
                    if (old - v).abs() > 1e-12 {
                        return Err(parse_err(n, format!("({i}{j}|{k}{l}) breaks permutational symmetry")));
                    }
                }
            }
            _ => return Err(parse_err(n, format!("unrecognized index pattern {idx:?}"))),
        }
    }
    let h: Vec<f64> = h.into_iter().map(|v| v.unwrap_or(0.0)).collect();
    IntegralModel::new(m, h, eri, e_core, SourceTag::Fcidump, n_alpha, n_beta)
}

/// Reads and parses an FCIDUMP file.
pub fn read_fcidump(path: &Path) -> Result<IntegralModel> {
    let text =
        std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_fcidump(&text)
}

/// Serializes a real-orbital model. Values use 17 significant digits, so
/// parsing the output reproduces the model exactly.
pub fn write_fcidump(model: &IntegralModel) -> Result<String> {
    if model.two_electron().symmetry() != EriSymmetry::Eightfold {
        return domain("FCIDUMP holds real-orbital integrals only; plane-wave models cannot be written");
    }
    let m = model.norb();
    let nelec = model.n_alpha() + model.n_beta();
    let ms2 = model.n_alpha() as i64 - model.n_beta() as i64;
    let mut out = String::new();
    let _ = writeln!(out, "&FCI NORB={m},NELEC={nelec},MS2={ms2},");
    let _ = writeln!(out, " ORBSYM={}", "1,".repeat(m));
    let _ = writeln!(out, " ISYM=1,");
    let _ = writeln!(out, "&END");
    for (k, v) in model.two_electron().entries() {
        let _ = writeln!(out, "{v:.16e} {} {} {} {}", k[0] + 1, k[1] + 1, k[2] + 1, k[3] + 1);
    }
    for p in 0..m {
        for q in 0..=p {
            let v = model.h(p, q);
            if v != 0.0 {
                let _ = writeln!(out, "{v:.16e} {} {} 0 0", p + 1, q + 1);
            }
        }
    }
    let _ = writeln!(out, "{:.16e} 0 0 0 0", model.e_core());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SITE: &str = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n\
        4.0 1 1 1 1\n4.0 2 2 2 2\n-1.0 2 1 0 0\n0.0 0 0 0 0\n";

    #[test]
    fn parses_header_and_records() {
        let m = parse_fcidump(TWO_SITE).unwrap();
        assert_eq!(m.norb(), 2);
        assert_eq!((m.n_alpha(), m.n_beta()), (1, 1));
        assert_eq!(m.h(0, 1), -1.0);
        assert_eq!(m.h(1, 0), -1.0);
        assert_eq!(m.eri(1, 1, 1, 1), 4.0);
        assert_eq!(m.eri(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn symmetry_closure() {
        let m = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 /\n0.5 1 1 1 1\n0.3 1 2 1 2\n").unwrap();
        assert_eq!(m.eri(0, 0, 0, 0), 0.5);
        for (p, q, r, s) in [(0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0), (1, 0, 1, 0)] {
            assert_eq!(m.eri(p, q, r, s), 0.3);
        }
    }

    #[test]
    fn round_trip_is_exact() {
        let text = "&FCI NORB=3,NELEC=2,MS2=0\n&END\n0.1234567890123456789 1 2 3 3\n\
            -0.333333333333333333 2 1 0 0\n1e-3 3 3 0 0\n7.25 0 0 0 0\n";
        let m = parse_fcidump(text).unwrap();
        let written = write_fcidump(&m).unwrap();
        let back = parse_fcidump(&written).unwrap();
        assert_eq!(m, back);
        assert_eq!(write_fcidump(&back).unwrap(), written);
    }

    #[test]
    fn fortran_exponents() {
        let m = parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0 &END\n0.5D+00 1 1 1 1\n").unwrap();
        assert_eq!(m.eri(0, 0, 0, 0), 0.5);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad_index = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 1 1 1 1\n0.5 3 1 1 1\n";
        match parse_fcidump(bad_index) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        let bad_value = "&FCI NORB=2,NELEC=2,MS2=0\n&END\nabc 1 1 1 1\n";
        assert!(matches!(parse_fcidump(bad_value), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(parse_fcidump("NORB=2\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_fcidump("&FCI NELEC=2\n&END\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_fcidump("&FCI NORB=2,NELEC=2\n0.5 1 1 1 1\n"), Err(Error::Parse { .. })));
        let asym = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n0.5 1 2 1 1\n0.6 2 1 1 1\n";
        assert!(matches!(parse_fcidump(asym), Err(Error::Parse { line: 4, .. })));
    }
}
