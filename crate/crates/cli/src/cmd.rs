use std::fs;
use std::path::Path;

use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use tamelift_core::approx::{anick_approximate, symp_approximate};
use tamelift_core::endo::{is_symplectic, jacobian, linear_part, EndoFile};
use tamelift_core::fixtures::{self, Fixture, FIXTURE_NAMES};
use tamelift_core::poly::{default_names, symplectic_names};
use tamelift_core::tame::{eval_word, invert_word};
use tamelift_core::weyl::{check_weyl_relations, classical_symbol, lift_word, moyal_star, HbarPoly};
use tamelift_core::{Error, Poly, PolyEndo, TameWord};

use crate::{ApproxKind, FixtureAction, Io, RandomKind, WordAction};

pub enum Failure {
    Validation(String),
    Input(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Input(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn write_to(path: &Path, value: &impl Serialize) -> Outcome {
    fs::write(path, to_json(value)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Writes the primary output; returns whether stdout was used.
fn emit(path: Option<&Path>, value: &impl Serialize) -> Result<bool, Failure> {
    match path {
        Some(p) => write_to(p, value).map(|_| false),
        None => {
            print!("{}", to_json(value));
            Ok(true)
        }
    }
}

fn say(io: &Io, stdout_taken: bool, line: impl AsRef<str>) {
    if io.quiet {
        return;
    }
    if stdout_taken {
        eprintln!("{}", line.as_ref());
    } else {
        println!("{}", line.as_ref());
    }
}

fn load_endo(path: &Path) -> Result<(EndoFile, PolyEndo), Failure> {
    let file: EndoFile = read(path)?;
    file.validate_shape().map_err(|e| Failure::Input(e.to_string()))?;
    let f = file.to_endo()?;
    Ok((file, f))
}

fn names_for(nvars: usize, n: Option<usize>) -> Vec<String> {
    match n {
        Some(n) if 2 * n == nvars => symplectic_names(n),
        _ => default_names(nvars),
    }
}

pub fn verify(io: &Io, rank: Option<usize>, degree: Option<u32>) -> Outcome {
    let file: EndoFile = read(&io.input)?;
    file.validate_shape().map_err(|e| Failure::Input(e.to_string()))?;
    let nvars = file.nvars;
    let n = rank.or(file.symplectic_n);
    let names = names_for(nvars, n);
    let origin: Vec<usize> = file.images.iter().enumerate().filter(|(_, p)| !p.constant_term().is_zero()).map(|(i, _)| i).collect();
    let origin_ok = origin.is_empty();
    let mut lines = Vec::new();
    let mut ok = origin_ok;
    let mut report = json!({ "nvars": nvars, "origin_preserved": origin_ok });
    if !origin_ok {
        lines.push(format!("origin preserved: no (images {:?} have constant terms)", origin.iter().map(|i| i + 1).collect::<Vec<_>>()));
    } else {
        lines.push("origin preserved: yes".into());
        let f = file.to_endo()?;
        let jac = jacobian(&f);
        let constant = jac.is_constant() && !jac.is_zero();
        ok &= constant;
        lines.push(format!("jacobian: {}", jac.to_string_with(&names)));
        lines.push(format!("jacobian constant: {}", if constant { "yes" } else { "no" }));
        let lin = linear_part(&f);
        let invertible = !lin.det()?.is_zero();
        ok &= invertible;
        if lin.is_identity() {
            lines.push("linear part: identity".into());
        } else {
            lines.push(format!("linear part: {lin}"));
        }
        lines.push(format!("linear part invertible: {}", if invertible { "yes" } else { "no" }));
        report["jacobian"] = serde_json::to_value(&jac).expect("serializable");
        report["jacobian_constant"] = json!(constant);
        report["linear_part"] = serde_json::to_value(&lin).expect("serializable");
        report["linear_part_invertible"] = json!(invertible);
        if let Some(n) = n {
            let sr = is_symplectic(&f, n, degree)?;
            let violations = sr.describe();
            ok &= violations.is_empty();
            if violations.is_empty() {
                lines.push(format!("symplectic (n={n}): yes"));
            } else {
                lines.push(format!("symplectic (n={n}): no"));
                lines.extend(violations.iter().map(|v| format!("  {v}")));
            }
            report["symplectic"] = json!({ "n": n, "cutoff": degree, "ok": violations.is_empty(), "violations": violations });
        }
    }
    report["ok"] = json!(ok);
    if let Some(p) = &io.report {
        write_to(p, &report)?;
    }
    let stdout = match &io.output {
        Some(p) => emit(Some(p), &report)?,
        None => false,
    };
    for l in &lines {
        say(io, stdout, l);
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Validation("verification failed".into()))
    }
}

pub fn approx(kind: ApproxKind, io: &Io, target: u32, rank: Option<usize>) -> Outcome {
    if target < 2 {
        return Err(Failure::Input("--degree must be at least 2".into()));
    }
    let (file, f) = load_endo(&io.input)?;
    let (word, report) = match kind {
        ApproxKind::Poly => anick_approximate(&f, target)?,
        ApproxKind::Symp => {
            let n = rank.or(file.symplectic_n).unwrap_or(f.nvars() / 2);
            if 2 * n != f.nvars() {
                return Err(Failure::Input(format!("rank {n} does not match {} variables", f.nvars())));
            }
            symp_approximate(&f, target)?
        }
    };
    if let Some(p) = &io.report {
        write_to(p, &report)?;
    }
    let stdout = emit(io.output.as_deref(), &word)?;
    for r in &report.rounds {
        say(io, stdout, format!("round k={}: {} -> {}, {} factors", r.k, r.height_before, r.height_after, r.factors_appended));
    }
    say(io, stdout, format!("word length: {}", report.word_length));
    say(io, stdout, format!("residual height: {} (target {target})", report.final_height));
    if report.success {
        Ok(())
    } else {
        let last = report.rounds.last().map_or("no rounds".to_string(), |r| format!("failing round k={}", r.k));
        Err(Failure::Validation(format!("residual height below target ({last})")))
    }
}

pub fn word(action: WordAction, io: &Io) -> Outcome {
    let w: TameWord = read(&io.input)?;
    match action {
        WordAction::Eval => {
            let f = eval_word(&w)?;
            let n = (w.is_symplectic() && !w.is_empty()).then_some(w.arity() / 2);
            let out = EndoFile::from_endo(&f, n);
            let stdout = emit(io.output.as_deref(), &out)?;
            say(io, stdout, format!("evaluated {} factors: {}", w.len(), f.to_string_with(&names_for(f.nvars(), n))));
        }
        WordAction::Invert => {
            let inv = invert_word(&w)?;
            let stdout = emit(io.output.as_deref(), &inv)?;
            say(io, stdout, format!("inverted {} factors", w.len()));
        }
    }
    Ok(())
}

pub fn lift(io: &Io) -> Outcome {
    let w: TameWord = read(&io.input)?;
    let e = lift_word(&w)?;
    let relations = check_weyl_relations(&e)?;
    let symbol_ok = classical_symbol(&e)? == eval_word(&w)?;
    let report = json!({
        "relations": relations,
        "symbol_matches_eval": symbol_ok,
        "ok": relations.ok && symbol_ok,
    });
    if let Some(p) = &io.report {
        write_to(p, &report)?;
    }
    let stdout = emit(io.output.as_deref(), &e)?;
    say(io, stdout, format!("weyl relations: {}", if relations.ok { "pass" } else { "fail" }));
    for v in relations.describe() {
        say(io, stdout, format!("  {v}"));
    }
    say(io, stdout, format!("classical symbol equals word: {}", if symbol_ok { "yes" } else { "no" }));
    if relations.ok && symbol_ok {
        Ok(())
    } else {
        Err(Failure::Validation("internal: lifted word failed verification".into()))
    }
}

fn read_series(path: &Path, order: u32) -> Result<HbarPoly, Failure> {
    let value: serde_json::Value = read(path)?;
    if value.get("L").is_some() {
        serde_json::from_value(value).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    } else {
        let p: Poly = serde_json::from_value(value).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        HbarPoly::classical(&p, order).map_err(|e| Failure::Input(e.to_string()))
    }
}

pub fn star(io: &Io, with: &Path, order: u32) -> Outcome {
    let f = read_series(&io.input, order)?;
    let g = read_series(with, order)?;
    let h = moyal_star(&f, &g, order)?;
    let stdout = emit(io.output.as_deref(), &h)?;
    say(io, stdout, format!("moyal product truncated at order {order}"));
    Ok(())
}

pub fn fixture(action: FixtureAction) -> Outcome {
    match action {
        FixtureAction::List => {
            for name in FIXTURE_NAMES {
                println!("{name}");
            }
            Ok(())
        }
        FixtureAction::Write { name, output } => {
            match fixtures::by_name(&name).ok_or_else(|| Failure::Input(format!("unknown fixture {name:?}")))? {
                Fixture::Endo(f) => emit(output.as_deref(), &f)?,
                Fixture::Word(w) => emit(output.as_deref(), &w)?,
            };
            Ok(())
        }
        FixtureAction::Random { kind, seed, rank, degree, factors, output } => {
            if rank == 0 || degree < 2 {
                return Err(Failure::Input("--rank must be positive and --degree at least 2".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = match kind {
                RandomKind::Tame => fixtures::random_tame_word(&mut rng, rank, factors, degree),
                RandomKind::Symplectic => fixtures::random_symplectic_word(&mut rng, rank, factors, degree),
            };
            emit(output.as_deref(), &w)?;
            Ok(())
        }
    }
}
