//! Mini-grammar for right-hand sides: `kind:pair;pair;...` where a pair is
//! `key=value` or, for kinds with a single parameter, a bare number.
//!
//! Temporal kinds feed the modal problem: `const:1.0`, `sine:omega=2.0`,
//! `cosine:omega=2.0`, `poly:c0;c1;...`, `pointmass:w=2.0`,
//! `samples:path=f.csv`. Wave kinds feed the space-time problem:
//! `modal:k=1;const=1.0` (also `sine=`/`cosine=` profiles),
//! `initvel:k=1;amp=3.14` where `amp` is the peak of amp*sin(k pi x / L),
//! and `griddensity:path=f.csv`. Parse errors carry the byte offset of the
//! offending token and the tokens expected there.

use crate::{Failure, RunResult};
use std::path::PathBuf;
use wavelab::spacetime::{GridSamples, WaveRhsSpec};
use wavelab::temporal::{DensityProfile, RhsSpec};

/// A parsed spec, still independent of the target problem; wave kinds keep
/// raw parameters so the spatial length can scale them later.
#[derive(Debug, Clone)]
pub enum ParsedRhs {
    Temporal(RhsSpec),
    Modal { k: usize, profile: DensityProfile },
    /// Initial velocity amp * sin(k pi x / L); `amp` is the peak value.
    InitVel { k: usize, amp: f64 },
    GridFile { path: PathBuf },
}

impl ParsedRhs {
    /// The spec for the modal problem; wave kinds are a usage error.
    pub fn into_temporal(self) -> RunResult<RhsSpec> {
        match self {
            ParsedRhs::Temporal(spec) => Ok(spec),
            _ => Err(Failure::Usage(
                "a wave right-hand side cannot drive the modal problem; use one of \
                 `const`, `sine`, `cosine`, `poly`, `pointmass`, `samples`"
                    .into(),
            )),
        }
    }

    /// The spec for the wave problem on a cylinder of spatial length `length`;
    /// temporal kinds are a usage error.
    pub fn into_wave(self, length: f64) -> RunResult<WaveRhsSpec> {
        match self {
            ParsedRhs::Modal { k, profile } => Ok(WaveRhsSpec::ModalDensity {
                k,
                density: profile,
            }),
            // The library amplitude multiplies the L2-normalized eigenfunction
            // sqrt(2/L) sin(k pi x / L); the grammar's `amp` is the sine peak.
            ParsedRhs::InitVel { k, amp } => Ok(WaveRhsSpec::InitialVelocity {
                k,
                amplitude: amp * (length / 2.0).sqrt(),
            }),
            ParsedRhs::GridFile { path } => {
                Ok(WaveRhsSpec::GridDensity(GridSamples::from_csv_path(&path)?))
            }
            ParsedRhs::Temporal(_) => Err(Failure::Usage(
                "a temporal right-hand side cannot drive the wave problem; use one of \
                 `modal`, `initvel`, `griddensity`"
                    .into(),
            )),
        }
    }
}

fn err_at(offset: usize, expected: &str, found: &str) -> Failure {
    Failure::Usage(format!(
        "rhs spec error at byte {offset}: expected {expected}, found `{found}`"
    ))
}

struct Pair<'a> {
    key: Option<(&'a str, usize)>,
    value: &'a str,
    value_off: usize,
}

fn parse_number(value: &str, off: usize) -> RunResult<f64> {
    let v: f64 = value.parse().map_err(|_| err_at(off, "a number", value))?;
    if !v.is_finite() {
        return Err(err_at(off, "a finite number", value));
    }
    Ok(v)
}

fn parse_index(value: &str, off: usize) -> RunResult<usize> {
    let k: usize = value
        .parse()
        .map_err(|_| err_at(off, "a positive integer", value))?;
    if k == 0 {
        return Err(err_at(off, "a mode index >= 1", value));
    }
    Ok(k)
}

/// The single parameter of a one-argument kind, keyed or bare.
fn single_number(pairs: &[Pair], key: &str, end: usize) -> RunResult<f64> {
    match pairs {
        [p] => {
            if let Some((k, koff)) = p.key {
                if k != key {
                    return Err(err_at(koff, &format!("key `{key}`"), k));
                }
            }
            parse_number(p.value, p.value_off)
        }
        [] => Err(err_at(end, &format!("one parameter `{key}=<number>`"), "")),
        [_, extra, ..] => Err(err_at(
            extra.key.map_or(extra.value_off, |(_, o)| o),
            "end of spec (this kind takes one parameter)",
            extra.value,
        )),
    }
}

fn single_path(pairs: &[Pair], end: usize) -> RunResult<PathBuf> {
    match pairs {
        [p] => {
            match p.key {
                Some(("path", _)) => {}
                Some((k, koff)) => return Err(err_at(koff, "key `path`", k)),
                None => return Err(err_at(p.value_off, "pair `path=<file>`", p.value)),
            }
            if p.value.is_empty() {
                return Err(err_at(p.value_off, "a file path", ""));
            }
            Ok(PathBuf::from(p.value))
        }
        [] => Err(err_at(end, "one parameter `path=<file>`", "")),
        [_, extra, ..] => Err(err_at(
            extra.key.map_or(extra.value_off, |(_, o)| o),
            "end of spec (this kind takes one parameter)",
            extra.value,
        )),
    }
}

/// Parses the grammar `kind:pair;pair;...`.
pub fn parse_rhs_spec(text: &str) -> RunResult<ParsedRhs> {
    const KINDS: &str = "one of `const`, `sine`, `cosine`, `poly`, `pointmass`, \
                         `samples`, `modal`, `initvel`, `griddensity`";
    let Some(colon) = text.find(':') else {
        return Err(err_at(text.len(), "`:` after the kind", text));
    };
    let kind = &text[..colon];
    let rest = &text[colon + 1..];
    let rest_off = colon + 1;
    let end = text.len();

    let mut pairs: Vec<Pair> = Vec::new();
    if !rest.is_empty() {
        let mut off = rest_off;
        for seg in rest.split(';') {
            if seg.is_empty() {
                return Err(err_at(off, "`key=value` or a number", ""));
            }
            match seg.find('=') {
                Some(i) => pairs.push(Pair {
                    key: Some((&seg[..i], off)),
                    value: &seg[i + 1..],
                    value_off: off + i + 1,
                }),
                None => pairs.push(Pair {
                    key: None,
                    value: seg,
                    value_off: off,
                }),
            }
            off += seg.len() + 1;
        }
    }

    match kind {
        "const" => Ok(ParsedRhs::Temporal(RhsSpec::Density(
            DensityProfile::Const(single_number(&pairs, "value", end)?),
        ))),
        "sine" => Ok(ParsedRhs::Temporal(RhsSpec::Density(
            DensityProfile::Sine {
                omega: single_number(&pairs, "omega", end)?,
            },
        ))),
        "cosine" => Ok(ParsedRhs::Temporal(RhsSpec::Density(
            DensityProfile::Cosine {
                omega: single_number(&pairs, "omega", end)?,
            },
        ))),
        "poly" => {
            if pairs.is_empty() {
                return Err(err_at(end, "at least one coefficient", ""));
            }
            let mut coeffs = Vec::with_capacity(pairs.len());
            for p in &pairs {
                if let Some((k, koff)) = p.key {
                    return Err(err_at(koff, "a bare coefficient", k));
                }
                coeffs.push(parse_number(p.value, p.value_off)?);
            }
            Ok(ParsedRhs::Temporal(RhsSpec::Density(DensityProfile::Poly(
                coeffs,
            ))))
        }
        "pointmass" => Ok(ParsedRhs::Temporal(RhsSpec::PointMass {
            weight: single_number(&pairs, "w", end)?,
        })),
        "samples" => Ok(ParsedRhs::Temporal(RhsSpec::Samples {
            path: single_path(&pairs, end)?,
        })),
        "modal" => {
            let mut k = None;
            let mut profile: Option<DensityProfile> = None;
            for p in &pairs {
                let Some((key, koff)) = p.key else {
                    return Err(err_at(
                        p.value_off,
                        "a pair keyed by `k`, `const`, `sine`, or `cosine`",
                        p.value,
                    ));
                };
                let set_profile = |profile: &mut Option<DensityProfile>,
                                   value: DensityProfile|
                 -> RunResult<()> {
                    if profile.is_some() {
                        return Err(err_at(koff, "a single profile parameter", key));
                    }
                    *profile = Some(value);
                    Ok(())
                };
                match key {
                    "k" => {
                        if k.is_some() {
                            return Err(err_at(koff, "`k` only once", key));
                        }
                        k = Some(parse_index(p.value, p.value_off)?);
                    }
                    "const" => set_profile(
                        &mut profile,
                        DensityProfile::Const(parse_number(p.value, p.value_off)?),
                    )?,
                    "sine" => set_profile(
                        &mut profile,
                        DensityProfile::Sine {
                            omega: parse_number(p.value, p.value_off)?,
                        },
                    )?,
                    "cosine" => set_profile(
                        &mut profile,
                        DensityProfile::Cosine {
                            omega: parse_number(p.value, p.value_off)?,
                        },
                    )?,
                    other => {
                        return Err(err_at(
                            koff,
                            "one of keys `k`, `const`, `sine`, `cosine`",
                            other,
                        ))
                    }
                }
            }
            let k = k.ok_or_else(|| err_at(end, "pair `k=<mode index>`", ""))?;
            let profile = profile.ok_or_else(|| {
                err_at(end, "a profile pair `const=`, `sine=`, or `cosine=`", "")
            })?;
            Ok(ParsedRhs::Modal { k, profile })
        }
        "initvel" => {
            let mut k = None;
            let mut amp = None;
            for p in &pairs {
                let Some((key, koff)) = p.key else {
                    return Err(err_at(p.value_off, "a pair keyed by `k` or `amp`", p.value));
                };
                match key {
                    "k" => {
                        if k.is_some() {
                            return Err(err_at(koff, "`k` only once", key));
                        }
                        k = Some(parse_index(p.value, p.value_off)?);
                    }
                    "amp" => {
                        if amp.is_some() {
                            return Err(err_at(koff, "`amp` only once", key));
                        }
                        amp = Some(parse_number(p.value, p.value_off)?);
                    }
                    other => return Err(err_at(koff, "one of keys `k`, `amp`", other)),
                }
            }
            Ok(ParsedRhs::InitVel {
                k: k.ok_or_else(|| err_at(end, "pair `k=<mode index>`", ""))?,
                amp: amp.ok_or_else(|| err_at(end, "pair `amp=<number>`", ""))?,
            })
        }
        "griddensity" => Ok(ParsedRhs::GridFile {
            path: single_path(&pairs, end)?,
        }),
        other => Err(err_at(0, KINDS, other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::io::Write;

    fn parse(text: &str) -> ParsedRhs {
        parse_rhs_spec(text).unwrap()
    }

    fn parse_err(text: &str) -> String {
        parse_rhs_spec(text).unwrap_err().message().to_string()
    }

    #[test]
    fn bare_constant_density() {
        match parse("const:1.0") {
            ParsedRhs::Temporal(RhsSpec::Density(DensityProfile::Const(c))) => {
                assert_eq!(c, 1.0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn keyed_point_mass() {
        match parse("pointmass:w=2.0") {
            ParsedRhs::Temporal(RhsSpec::PointMass { weight }) => assert_eq!(weight, 2.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn initial_velocity_amp_is_the_sine_peak() {
        // amp = pi realizes v0 = pi sin(pi x) on the unit interval.
        let parsed = parse("initvel:k=1;amp=3.14159265358979");
        let ParsedRhs::InitVel { k, amp } = parsed.clone() else {
            panic!("{parsed:?}");
        };
        assert_eq!(k, 1);
        assert!((amp - PI).abs() < 1e-13);
        match parsed.into_wave(1.0).unwrap() {
            WaveRhsSpec::InitialVelocity { k: 1, amplitude } => {
                assert!((amplitude - amp * 0.5f64.sqrt()).abs() < 1e-15);
                assert!((amplitude - PI / 2.0f64.sqrt()).abs() < 1e-13);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trig_profiles_accept_bare_and_keyed_forms() {
        for text in ["sine:2.5", "sine:omega=2.5"] {
            match parse(text) {
                ParsedRhs::Temporal(RhsSpec::Density(DensityProfile::Sine { omega })) => {
                    assert_eq!(omega, 2.5)
                }
                other => panic!("{other:?}"),
            }
        }
        match parse("cosine:omega=4.0") {
            ParsedRhs::Temporal(RhsSpec::Density(DensityProfile::Cosine { omega })) => {
                assert_eq!(omega, 4.0)
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polynomial_coefficients_are_bare_and_ordered() {
        match parse("poly:1.0;0.5;2.0") {
            ParsedRhs::Temporal(RhsSpec::Density(DensityProfile::Poly(c))) => {
                assert_eq!(c, vec![1.0, 0.5, 2.0])
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_err("poly:a=1").contains("bare coefficient"));
    }

    #[test]
    fn modal_profiles() {
        match parse("modal:k=2;const=1.5") {
            ParsedRhs::Modal { k, profile } => {
                assert_eq!(k, 2);
                assert_eq!(profile, DensityProfile::Const(1.5));
            }
            other => panic!("{other:?}"),
        }
        match parse("modal:sine=3.0;k=1") {
            ParsedRhs::Modal { k: 1, profile } => {
                assert_eq!(profile, DensityProfile::Sine { omega: 3.0 })
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wave_and_temporal_kinds_do_not_cross() {
        assert!(parse("modal:k=1;const=1.0").into_temporal().is_err());
        assert!(parse("const:1.0").into_wave(1.0).is_err());
        assert!(parse("const:1.0").into_temporal().is_ok());
    }

    #[test]
    fn errors_carry_byte_offsets_and_expected_tokens() {
        let e = parse_err("konst:1.0");
        assert!(e.contains("byte 0"), "{e}");
        assert!(e.contains("`griddensity`"), "{e}");
        let e = parse_err("const");
        assert!(e.contains("byte 5") && e.contains("`:`"), "{e}");
        let e = parse_err("const:");
        assert!(e.contains("byte 6"), "{e}");
        let e = parse_err("const:x=1");
        assert!(e.contains("byte 6") && e.contains("key `value`"), "{e}");
        let e = parse_err("pointmass:w=abc");
        assert!(e.contains("byte 12") && e.contains("a number"), "{e}");
        let e = parse_err("modal:k=0;const=1");
        assert!(e.contains("byte 8") && e.contains(">= 1"), "{e}");
        let e = parse_err("modal:k=1");
        assert!(e.contains("profile"), "{e}");
        let e = parse_err("modal:k=1;const=1;sine=2");
        assert!(e.contains("single profile"), "{e}");
        let e = parse_err("initvel:k=1");
        assert!(e.contains("`amp=<number>`"), "{e}");
        let e = parse_err("sine:omega=inf");
        assert!(e.contains("finite"), "{e}");
        let e = parse_err("const:1.0;2.0");
        assert!(e.contains("byte 10") && e.contains("one parameter"), "{e}");
    }

    #[test]
    fn grid_density_loads_from_a_csv_file() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "t,0.0,0.5,1.0").unwrap();
        writeln!(file, "0.0,1.0,2.0,1.0").unwrap();
        writeln!(file, "1.0,0.0,1.0,0.0").unwrap();
        let spec = parse(&format!("griddensity:path={}", file.path().display()));
        match spec.into_wave(1.0).unwrap() {
            WaveRhsSpec::GridDensity(g) => {
                assert_eq!(g.times(), &[0.0, 1.0]);
                assert_eq!(g.points(), &[0.0, 0.5, 1.0]);
                assert_eq!(g.eval(0.0, 0.5).unwrap(), 2.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grid_density_errors_name_the_problem() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "t,0.0,1.0").unwrap();
        writeln!(file, "0.0,1.0").unwrap();
        let spec = ParsedRhs::GridFile {
            path: file.path().to_path_buf(),
        };
        let e = spec.into_wave(1.0).unwrap_err();
        assert_eq!(e.exit_code(), 1);
        assert!(e.message().contains("columns"), "{e}");

        let missing = ParsedRhs::GridFile {
            path: PathBuf::from("/nonexistent/grid.csv"),
        };
        assert_eq!(missing.into_wave(1.0).unwrap_err().exit_code(), 1);
    }
}
