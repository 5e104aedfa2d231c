//! Plain-text network checkpoints.
//!
//! ```text
//! reactive-pinn-checkpoint 1
//! seed 42
//! layers 2 50 50 1
//! weights 0
//! <n_1 lines, n_0 values each: row-major W_0>
//! biases 0
//! <one line, n_1 values>
//! weights 1
//! ...
//! ```
//!
//! Values are written in shortest round-trip exponent form, so a checkpoint
//! reloads bit-identically. Version 1 is the only version.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::NetworkParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &str = "reactive-pinn-checkpoint";
const VERSION: u32 = 1;

pub fn to_string<T: Real>(params: &NetworkParams<T>) -> String {
    let mut out = String::new();
    let join = |vals: &mut dyn Iterator<Item = &T>| {
        vals.map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ")
    };
    writeln!(out, "{MAGIC} {VERSION}").unwrap();
    writeln!(out, "seed {}", params.seed).unwrap();
    let sizes: Vec<String> = params.layer_sizes().iter().map(|s| s.to_string()).collect();
    writeln!(out, "layers {}", sizes.join(" ")).unwrap();
    for (l, (w, b)) in params.weights.iter().zip(&params.biases).enumerate() {
        writeln!(out, "weights {l}").unwrap();
        for row in w.rows() {
            writeln!(out, "{}", join(&mut row.iter())).unwrap();
        }
        writeln!(out, "biases {l}").unwrap();
        writeln!(out, "{}", join(&mut b.iter())).unwrap();
    }
    out
}

pub fn from_str<T: Real>(text: &str) -> Result<NetworkParams<T>> {
    let mut lines = text.lines().enumerate();
    let mut next = |what: &str| -> Result<(usize, &str)> {
        lines
            .next()
            .map(|(i, l)| (i + 1, l.trim()))
            .ok_or_else(|| Error::parse(what, "unexpected end of checkpoint"))
    };
    let bad = |line: usize, msg: &str| Error::parse(format!("line {line}"), msg);

    let (n, header) = next("header")?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        return Err(bad(n, "not a network checkpoint"));
    }
    match parts.next().and_then(|v| v.parse::<u32>().ok()) {
        Some(VERSION) => {}
        _ => return Err(bad(n, "unsupported checkpoint version")),
    }

    let (n, seed_line) = next("seed")?;
    let seed = seed_line
        .strip_prefix("seed ")
        .and_then(|s| s.trim().parse::<u64>().ok())
        .ok_or_else(|| bad(n, "expected `seed <u64>`"))?;

    let (n, layer_line) = next("layers")?;
    let sizes: Vec<usize> = layer_line
        .strip_prefix("layers ")
        .ok_or_else(|| bad(n, "expected `layers ...`"))?
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|_| bad(n, "bad layer size")))
        .collect::<Result<_>>()?;

    let parse_row = |line: usize, text: &str, expect: usize| -> Result<Vec<T>> {
        let vals = text
            .split_whitespace()
            .map(|v| v.parse::<T>().map_err(|_| bad(line, "bad number")))
            .collect::<Result<Vec<T>>>()?;
        if vals.len() != expect {
            return Err(bad(line, "wrong number of values"));
        }
        Ok(vals)
    };

    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for (l, pair) in sizes.windows(2).enumerate() {
        let (n_in, n_out) = (pair[0], pair[1]);
        let (n, tag) = next("weights")?;
        if tag != format!("weights {l}") {
            return Err(bad(n, "expected weights header"));
        }
        let mut flat = Vec::with_capacity(n_in * n_out);
        for _ in 0..n_out {
            let (n, row) = next("weights row")?;
            flat.extend(parse_row(n, row, n_in)?);
        }
        weights.push(Array2::from_shape_vec((n_out, n_in), flat).expect("shape checked"));
        let (n, tag) = next("biases")?;
        if tag != format!("biases {l}") {
            return Err(bad(n, "expected biases header"));
        }
        let (n, row) = next("biases row")?;
        biases.push(Array1::from(parse_row(n, row, n_out)?));
    }
    let mut params = NetworkParams::from_layers(weights, biases)?;
    if params.layer_sizes() != sizes.as_slice() {
        return Err(Error::parse("layers", "layer sizes do not match the stored matrices"));
    }
    params.seed = seed;
    Ok(params)
}

pub fn save<T: Real>(params: &NetworkParams<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_string(params))?;
    Ok(())
}

pub fn load<T: Real>(path: impl AsRef<Path>) -> Result<NetworkParams<T>> {
    from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reload_is_bit_identical() {
        let p = NetworkParams::<f64>::init(&[2, 7, 5, 3], 99).unwrap();
        let back: NetworkParams<f64> = from_str(&to_string(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_truncated_file() {
        let p = NetworkParams::<f64>::init(&[2, 3, 1], 1).unwrap();
        let text = to_string(&p);
        let cut: String = text.lines().take(5).collect::<Vec<_>>().join("\n");
        assert!(from_str::<f64>(&cut).is_err());
    }

    #[test]
    fn rejects_wrong_version() {
        assert!(from_str::<f64>("reactive-pinn-checkpoint 7\n").is_err());
    }
}
