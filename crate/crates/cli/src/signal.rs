use hermheat::estimator::{corpus, CorpusEntry};
use hermheat::hermite::{HermiteBasis, HermiteExpansion, MultiIndex};
use hermheat::phasespace::Signal;
use hermheat::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SignalSpec;

/// Problems with a signal that can be detected before any computation.
pub fn check(spec: &SignalSpec, d: usize, degree: usize) -> Result<(), String> {
    match spec {
        SignalSpec::Hermite { index, amplitude } => {
            if index.len() != d {
                return Err(format!("hermite index {index:?} has {} entries, d = {d}", index.len()));
            }
            let order: usize = index.iter().sum();
            if order > degree {
                return Err(format!("hermite index of order {order} exceeds degree {degree}"));
            }
            if !amplitude.is_finite() {
                return Err("amplitude must be finite".into());
            }
        }
        SignalSpec::Coefficients { re, im } => {
            let len = HermiteBasis::new(d, degree).map_err(|e| e.to_string())?.len();
            if re.len() > len || im.len() > len {
                return Err(format!("{} coefficients given, the degree-{degree} basis has {len}", re.len().max(im.len())));
            }
            if re.iter().chain(im).any(|v| !v.is_finite()) {
                return Err("coefficients must be finite".into());
            }
        }
        SignalSpec::Corpus { name } => {
            if d != 1 {
                return Err(format!("corpus signals are one-dimensional, d = {d}"));
            }
            if lookup(name, 0).is_none() {
                let names: Vec<String> = corpus(0).into_iter().map(|e| e.name).collect();
                return Err(format!("unknown corpus entry {name:?}; known: {}", names.join(", ")));
            }
        }
        SignalSpec::Random { degree: r } => {
            if *r > degree {
                return Err(format!("random degree {r} exceeds degree {degree}"));
            }
        }
    }
    Ok(())
}

fn lookup(name: &str, seed: u64) -> Option<CorpusEntry> {
    corpus(seed).into_iter().find(|e| e.name == name)
}

/// Short label for CSV rows.
pub fn label(spec: &SignalSpec) -> String {
    match spec {
        SignalSpec::Hermite { index, amplitude } => {
            let idx: Vec<String> = index.iter().map(|i| i.to_string()).collect();
            format!("{amplitude}*phi{}", idx.join("-"))
        }
        SignalSpec::Coefficients { re, .. } => format!("coefficients{}", re.len()),
        SignalSpec::Corpus { name } => name.clone(),
        SignalSpec::Random { degree } => format!("random{degree}"),
    }
}

/// The signal as a degree-`degree` expansion; corpus entries are projected.
pub fn expansion(spec: &SignalSpec, d: usize, degree: usize, seed: u64) -> hermheat::Result<HermiteExpansion> {
    let basis = HermiteBasis::shared(d, degree)?;
    match spec {
        SignalSpec::Hermite { index, amplitude } => {
            let e = HermiteExpansion::basis_function(&MultiIndex::new(index.clone())?, degree)?;
            Ok(e.scale(Complex64::new(*amplitude, 0.0)))
        }
        SignalSpec::Coefficients { re, im } => {
            let c = (0..basis.len())
                .map(|i| Complex64::new(re.get(i).copied().unwrap_or(0.0), im.get(i).copied().unwrap_or(0.0)))
                .collect();
            HermiteExpansion::from_coeffs(basis, c)
        }
        SignalSpec::Corpus { name } => lookup(name, seed)
            .ok_or_else(|| hermheat::Error::InvalidArgument(format!("unknown corpus entry {name:?}")))?
            .project(degree),
        SignalSpec::Random { degree: r } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let small = HermiteBasis::shared(d, *r)?;
            let c = (0..small.len())
                .map(|i| {
                    if i == 0 {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2))
                    }
                })
                .collect();
            HermiteExpansion::from_coeffs(small, c)?.with_degree(degree)
        }
    }
}

/// As `expansion`, except that corpus entries stay sampled functions.
pub fn signal(spec: &SignalSpec, d: usize, degree: usize, seed: u64) -> hermheat::Result<Signal> {
    match spec {
        SignalSpec::Corpus { name } => Ok(lookup(name, seed)
            .ok_or_else(|| hermheat::Error::InvalidArgument(format!("unknown corpus entry {name:?}")))?
            .function
            .into()),
        other => Ok(expansion(other, d, degree, seed)?.into()),
    }
}
