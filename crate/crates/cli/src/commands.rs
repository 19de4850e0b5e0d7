use std::path::Path;

use flatlab::barker::{is_barker, search_barker_resumable, turyn_storer_admissible, SearchConfig};
use flatlab::correspondence::{
    check_decomposition, check_root_identity, differenced_identity_residual, lagrange_negated_reconstruction,
};
use flatlab::flat_scan::{flat_scan, FlatScanConfig};
use flatlab::morse::{morse_flatness_scan, morse_prefix, thue_morse, MorseBlock};
use flatlab::numtheory::{
    arithmetic_polynomial_norms, chowla_correlation, moment_experiment, rh_bound_scan, MomentConfig, MomentModel,
    SieveTable,
};
use flatlab::poly::{
    flatness_report, identity_tolerance, integer_polynomial_norm, l4_norm_4_exact, NormRow, NormalizedPolynomial,
};
use flatlab::report::format_f64;
use flatlab::seq::{decode_bitset, parse_sequence, random_littlewood, random_signs, ParsedSequence};
use flatlab::spectral::{periodogram, real_to_complex, spectral_fourier_check, wiener_correlations};
use flatlab::stats::{autocorrelation, null_band, pairwise_independence_scan, set_dft};
use flatlab::{IntegerSequence, SignSequence};
use serde::Serialize;
use serde_json::json;

use crate::output::Run;
use crate::{
    BarkerArgs, ChowlaArgs, Cli, CliError, Command, FlatScanArgs, IdentityArgs, IndependenceArgs, MomentsArgs,
    MorseArgs, NormsArgs, RhScanArgs, SeqArgs, SeqSource, SetDftArgs, SieveArgs, SpectrumArgs, TableSource,
};

type Result<T> = std::result::Result<T, CliError>;

/// Sequences longer than this are summarized rather than echoed in reports.
const ECHO_LIMIT: usize = 4096;

pub fn run(cli: Cli) -> Result<()> {
    let (seed, jobs, format) = (cli.seed, cli.jobs.max(1), cli.format);
    let start = |name: &'static str, out: &Path| Run::new(name, out, format, seed, jobs);
    match cli.command {
        Command::Norms(a) => norms(start("norms", &a.out.out)?, a, seed),
        Command::IdentityCheck(a) => identity_check(start("identity-check", &a.out.out)?, a, seed),
        Command::Autocorr(a) => autocorr(start("autocorr", &a.out.out)?, a, seed),
        Command::Setdft(a) => setdft(start("setdft", &a.out.out)?, a),
        Command::Independence(a) => independence(start("independence", &a.out.out)?, a, seed),
        Command::Barker(a) => barker(start("barker", &a.out.out)?, a, jobs),
        Command::Morse(a) => morse(start("morse", &a.out.out)?, a),
        Command::Sieve(a) => {
            let dir = a.out.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new(".")).to_path_buf();
            sieve(start("sieve", &dir)?, a)
        }
        Command::RhScan(a) => rh_scan(start("rh-scan", &a.out.out)?, a),
        Command::Chowla(a) => chowla(start("chowla", &a.out.out)?, a),
        Command::Moments(a) => moments(start("moments", &a.out.out)?, a, seed, jobs),
        Command::Spectrum(a) => spectrum(start("spectrum", &a.out.out)?, a, seed),
        Command::FlatScan(a) => flat_scan_cmd(start("flat-scan", &a.out.out)?, a, seed, jobs),
    }
}

struct Loaded {
    seq: ParsedSequence,
    source: String,
}

fn load(run: &mut Run, source: &SeqSource, seed: u64) -> Result<Loaded> {
    let given = [
        source.seq.is_some(),
        source.input.is_some(),
        source.bitset.is_some(),
        source.random.is_some(),
        source.thue_morse.is_some(),
    ];
    match given.iter().filter(|&&g| g).count() {
        1 => {}
        0 => return Err(CliError::Usage("one of --seq, --in, --bitset, --random or --thue-morse is required".into())),
        _ => return Err(CliError::Usage("--seq, --in, --bitset, --random and --thue-morse are mutually exclusive".into())),
    }
    if let Some(text) = &source.seq {
        return Ok(Loaded { seq: parse_sequence(text)?, source: "seq".into() });
    }
    if let Some(path) = &source.input {
        let bytes = run.read_input(path)?;
        let text = String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{} is not UTF-8 text", path.display())))?;
        return Ok(Loaded { seq: parse_sequence(&text)?, source: format!("file:{}", path.display()) });
    }
    if let Some(path) = &source.bitset {
        let bits = decode_bitset(&run.read_input(path)?)?;
        let seq = SignSequence::from_bools(&bits)?;
        return Ok(Loaded { seq: ParsedSequence::Signs(seq), source: format!("bitset:{}", path.display()) });
    }
    if let Some(n) = source.random {
        return Ok(Loaded { seq: ParsedSequence::Signs(random_signs(n, seed, 0)?), source: format!("random:{n}") });
    }
    let n = source.thue_morse.expect("counted above");
    let seq = SignSequence::new(thue_morse(n))?;
    Ok(Loaded { seq: ParsedSequence::Signs(seq), source: format!("thue-morse:{n}") })
}

fn kind(seq: &ParsedSequence) -> &'static str {
    match seq {
        ParsedSequence::Signs(_) => "signs",
        ParsedSequence::Bits(_) => "bits",
    }
}

fn echo(seq: &ParsedSequence) -> Option<String> {
    (seq.len() <= ECHO_LIMIT).then(|| match seq {
        ParsedSequence::Signs(s) => s.to_sign_string(),
        ParsedSequence::Bits(b) => b.to_bit_string(),
    })
}

fn values(seq: &ParsedSequence) -> Vec<i64> {
    match seq {
        ParsedSequence::Signs(s) => s.to_i64(),
        ParsedSequence::Bits(b) => b.to_i64(),
    }
}

fn f(v: f64) -> String {
    format_f64(v)
}

fn norm_rows_csv(rows: &[NormRow]) -> Vec<Vec<String>> {
    rows.iter().map(|r| vec![f(r.alpha), f(r.power_integral), f(r.norm), f(r.bracket)]).collect()
}

fn norms(mut run: Run, a: NormsArgs, seed: u64) -> Result<()> {
    if let Some(which) = a.arith {
        let (table, source) = open_table(&mut run, &TableSource { table: a.table.clone().unwrap_or("sieve.bin".into()), n: a.table.is_none().then_some(a.n).flatten() })?;
        let n = a.n.unwrap_or(table.bound());
        let rows = arithmetic_polynomial_norms(&table, which, n, &a.alpha)?;
        run.report(json!({ "arith": which, "n": n, "alpha": a.alpha, "table": source }), &json!({ "norms": rows }))?;
        run.csv(&["alpha", "power_integral", "norm", "bracket"], norm_rows_csv(&rows))?;
        return Ok(run.finish()?);
    }
    let loaded = load(&mut run, &a.source, seed)?;
    let seq = &loaded.seq;
    let vals = values(seq);
    let energy: i64 = vals.iter().map(|v| v * v).sum();
    if energy == 0 {
        return Err(flatlab::FlatError::ZeroPolynomial.into());
    }
    let rows: Vec<NormRow> =
        a.alpha.iter().map(|&alpha| integer_polynomial_norm(&vals, energy as f64, alpha)).collect::<flatlab::Result<_>>()?;
    let profile = autocorrelation(&vals_as_seq(seq));
    let report = match seq {
        ParsedSequence::Signs(s) => flatness_report(s)?,
        ParsedSequence::Bits(b) => flatness_report(b)?,
    };
    let exact = profile.l4_fourth_power_exact();
    let result = json!({
        "kind": kind(seq),
        "length": seq.len(),
        "energy": energy,
        "sequence": echo(seq),
        "l4_fourth_power": report.l4_fourth_power,
        "l4_fourth_power_exact": exact,
        "merit_factor_exact": profile.merit_factor_exact(),
        "norms": rows,
        "flatness": report,
    });
    run.report(json!({ "source": loaded.source, "alpha": a.alpha }), &result)?;
    run.csv(&["alpha", "power_integral", "norm", "bracket"], norm_rows_csv(&rows))?;
    Ok(run.finish()?)
}

struct Values(Vec<i64>);

impl IntegerSequence for Values {
    fn len(&self) -> usize {
        self.0.len()
    }

    fn value(&self, index: usize) -> i64 {
        self.0[index]
    }
}

fn vals_as_seq(seq: &ParsedSequence) -> Values {
    Values(values(seq))
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    max_residual: f64,
    tolerance: f64,
    pass: bool,
    sequences: usize,
    skipped: usize,
}

fn identity_check(mut run: Run, a: IdentityArgs, seed: u64) -> Result<()> {
    let sequences: Vec<SignSequence> = match a.source.random {
        Some(q) => (0..a.count).map(|i| random_littlewood(q, seed, i as u64)).collect::<flatlab::Result<_>>()?,
        None => vec![load(&mut run, &a.source, seed)?.seq.to_signs()],
    };
    let names = ["decomposition", "root-identity", "negated-reconstruction", "two-grid-fourth-moment", "differenced"];
    let mut rows: Vec<CheckRow> = names
        .iter()
        .map(|&check| CheckRow { check, max_residual: 0.0, tolerance: 0.0, pass: true, sequences: 0, skipped: 0 })
        .collect();
    for s in &sequences {
        s.require_littlewood_class()?;
        let q = s.len();
        let grid = a.grid.unwrap_or_else(|| (4 * q).max(64).next_power_of_two());
        let odd = q % 2 == 1;
        let profile = autocorrelation(s);
        let results: [Option<(f64, f64)>; 5] = [
            Some((check_decomposition(s, grid)?, 1e-10)),
            Some((check_root_identity(s)?, 1e-10)),
            if odd { Some((lagrange_negated_reconstruction(s)?, identity_tolerance(q))) } else { None },
            if odd {
                let two_grid = l4_norm_4_exact(&NormalizedPolynomial::littlewood(s))?;
                let formula = 1.0 + 2.0 * profile.sidelobe_energy as f64 / (q * q) as f64;
                Some(((two_grid - formula).abs(), identity_tolerance(q)))
            } else {
                None
            },
            Some((differenced_identity_residual(s, a.ell, grid)?, 1e-10)),
        ];
        for (row, r) in rows.iter_mut().zip(results) {
            match r {
                Some((residual, tol)) => {
                    row.sequences += 1;
                    row.max_residual = row.max_residual.max(residual);
                    row.tolerance = row.tolerance.max(tol);
                    row.pass &= residual < tol;
                }
                None => row.skipped += 1,
            }
        }
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    let params = json!({ "count": sequences.len(), "ell": a.ell, "grid": a.grid, "random": a.source.random });
    run.report(params, &json!({ "checks": rows, "all_pass": failed == 0 }))?;
    run.csv(
        &["check", "max_residual", "tolerance", "pass"],
        rows.iter().map(|r| vec![r.check.to_string(), f(r.max_residual), f(r.tolerance), r.pass.to_string()]).collect(),
    )?;
    run.finish()?;
    if failed > 0 {
        return Err(CliError::ChecksFailed { failed, total: rows.len() });
    }
    Ok(())
}

fn autocorr(mut run: Run, a: SeqArgs, seed: u64) -> Result<()> {
    let loaded = load(&mut run, &a.source, seed)?;
    let profile = autocorrelation(&vals_as_seq(&loaded.seq));
    let (defect, merit) = profile.defect_and_merit();
    let result = json!({
        "kind": kind(&loaded.seq),
        "length": loaded.seq.len(),
        "profile": profile,
        "l4_fourth_power": 1.0 + defect,
        "l4_fourth_power_exact": profile.l4_fourth_power_exact(),
        "merit_factor": merit,
        "merit_factor_exact": profile.merit_factor_exact(),
    });
    run.report(json!({ "source": loaded.source }), &result)?;
    let c0 = profile.c0() as f64;
    let band = null_band(loaded.seq.len());
    run.csv(
        &["lag", "value", "band"],
        profile.c.iter().enumerate().skip(1).map(|(k, &c)| vec![k.to_string(), f(c as f64 / c0), f(band)]).collect(),
    )?;
    Ok(run.finish()?)
}

fn setdft(mut run: Run, a: SetDftArgs) -> Result<()> {
    let set: Vec<i64> = a
        .set
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<i64>().map_err(|_| CliError::Usage(format!("'{s}' is not an integer"))))
        .collect::<Result<_>>()?;
    let spectrum = set_dft(&set, a.r, a.balanced)?;
    run.report(json!({ "set": set, "r": a.r, "balanced": a.balanced }), &spectrum)?;
    run.csv(
        &["ell", "re", "im", "abs"],
        spectrum.dft.iter().enumerate().map(|(l, v)| vec![l.to_string(), f(v.re), f(v.im), f(v.norm())]).collect(),
    )?;
    Ok(run.finish()?)
}

fn independence(mut run: Run, a: IndependenceArgs, seed: u64) -> Result<()> {
    let loaded = load(&mut run, &a.source, seed)?;
    let signs = loaded.seq.to_signs();
    let window = a.window.unwrap_or(signs.len());
    let scan = pairwise_independence_scan(&signs, a.max_lag, window)?;
    run.report(json!({ "source": loaded.source, "max_lag": a.max_lag, "window": window }), &scan)?;
    run.csv(
        &["lag", "value", "band"],
        scan.rows.iter().map(|r| vec![r.lag.to_string(), f(r.value), f(scan.band)]).collect(),
    )?;
    Ok(run.finish()?)
}

fn barker(mut run: Run, a: BarkerArgs, jobs: usize) -> Result<()> {
    let config = SearchConfig { prune: a.prune, jobs, cap: a.cap };
    let result = search_barker_resumable(a.n, config, a.checkpoint.as_deref())?;
    debug_assert!(result.found.iter().all(|s| is_barker(s).is_barker));
    let params = json!({ "n": a.n, "prune": a.prune, "cap": a.cap });
    run.report(params, &json!({ "search": result, "turyn_storer_admissible": turyn_storer_admissible(a.n) }))?;
    run.csv(
        &["index", "sequence", "reversal_of"],
        result
            .found
            .iter()
            .zip(&result.reversal_of)
            .enumerate()
            .map(|(i, (s, r))| vec![i.to_string(), s.to_sign_string(), r.to_string()])
            .collect(),
    )?;
    eprintln!("n = {}: {} Barker sequence(s), {} nodes, {:.3} s", a.n, result.count, result.nodes_explored, result.wall_time);
    Ok(run.finish()?)
}

fn morse(mut run: Run, a: MorseArgs) -> Result<()> {
    let factors = MorseBlock::parse_list(&a.factors)?;
    let scan = morse_flatness_scan(&factors, &a.lengths)?;
    let prefix = morse_prefix(&factors, a.lengths.iter().copied().max().unwrap_or(1))?;
    for w in &prefix.warnings {
        eprintln!("warning: {w}");
    }
    let result = json!({
        "boundaries": prefix.boundaries,
        "factors_used": prefix.factors,
        "warnings": prefix.warnings,
        "scan": scan,
    });
    run.report(json!({ "factors": factors, "lengths": a.lengths }), &result)?;
    run.csv(
        &["length", "l4_fourth_power", "merit_factor", "mahler", "is_full_product"],
        scan.entries
            .iter()
            .map(|e| {
                vec![
                    e.length.to_string(),
                    f(e.report.l4_fourth_power),
                    f(e.report.merit_factor.value()),
                    f(e.report.mahler),
                    e.is_full_product.to_string(),
                ]
            })
            .collect(),
    )?;
    Ok(run.finish()?)
}

fn sieve(mut run: Run, a: SieveArgs) -> Result<()> {
    let table = SieveTable::new(a.n)?;
    let mut bytes = Vec::new();
    table.write_to(&mut bytes)?;
    run.write_file(&a.out, &bytes)?;
    let n = table.bound();
    let result = json!({
        "bound": n,
        "squarefree_count": table.squarefree_count(),
        "mertens": table.mertens(n),
        "lambda_sum": table.lambda_sum(n),
        "mertens_head": (1..=n.min(10)).map(|x| table.mertens(x)).collect::<Vec<_>>(),
        "table_bytes": bytes.len(),
    });
    run.report(json!({ "n": a.n, "table": a.out.display().to_string() }), &result)?;
    Ok(run.finish()?)
}

fn open_table(run: &mut Run, source: &TableSource) -> Result<(SieveTable, String)> {
    match source.n {
        Some(n) => Ok((SieveTable::new(n)?, format!("sieve:{n}"))),
        None => {
            let bytes = run.read_input(&source.table)?;
            Ok((SieveTable::read_from(&bytes[..])?, format!("file:{}", source.table.display())))
        }
    }
}

fn rh_scan(mut run: Run, a: RhScanArgs) -> Result<()> {
    let (table, source) = open_table(&mut run, &a.table)?;
    let scan = rh_bound_scan(&table, a.which, a.eps)?;
    run.report(json!({ "table": source, "which": a.which, "eps": a.eps }), &scan)?;
    run.csv(
        &["x", "partial_sum", "ratio"],
        scan.checkpoints.iter().map(|p| vec![p.x.to_string(), p.partial_sum.to_string(), f(p.ratio)]).collect(),
    )?;
    Ok(run.finish()?)
}

fn chowla(mut run: Run, a: ChowlaArgs) -> Result<()> {
    let (table, source) = open_table(&mut run, &a.table)?;
    let reach = a.offsets.iter().copied().max().unwrap_or(0);
    let window = a.window.unwrap_or(table.bound().saturating_sub(reach));
    let result = chowla_correlation(&table, &a.offsets, window)?;
    run.report(json!({ "table": source, "offsets": a.offsets, "window": window }), &result)?;
    Ok(run.finish()?)
}

fn moments(mut run: Run, a: MomentsArgs, seed: u64, jobs: usize) -> Result<()> {
    let table = match a.model {
        MomentModel::LambdaShifted => {
            let bytes = run.read_input(&a.table)?;
            Some(SieveTable::read_from(&bytes[..])?)
        }
        MomentModel::RandomSign => None,
    };
    let config = MomentConfig { model: a.model, n: a.n, trials: a.trials, p: a.p, seed, jobs };
    let result = moment_experiment(config, table.as_ref())?;
    let params = json!({ "model": a.model, "n": a.n, "trials": a.trials, "p": a.p, "seed": seed });
    run.report(params, &result)?;
    Ok(run.finish()?)
}

fn spectrum(mut run: Run, a: SpectrumArgs, seed: u64) -> Result<()> {
    let loaded = load(&mut run, &a.source, seed)?;
    let x: Vec<f64> = match &loaded.seq {
        ParsedSequence::Signs(s) => s.coeffs().iter().map(|&v| v as f64).collect(),
        ParsedSequence::Bits(b) => b.centered(),
    };
    let n = x.len();
    let grid = a.grid.unwrap_or(n.next_power_of_two());
    let lags = a.lags.min(n - 1);
    let cx = real_to_complex(&x);
    let correlations = wiener_correlations(&cx, lags)?;
    let check = if lags >= 1 { Some(spectral_fourier_check(&x, lags)?) } else { None };
    let power = periodogram(&cx, grid)?;
    let mean = power.iter().sum::<f64>() / grid as f64;
    let (peak, max) = power.iter().copied().enumerate().fold((0, f64::MIN), |best, (j, v)| if v > best.1 { (j, v) } else { best });
    let result = json!({
        "kind": kind(&loaded.seq),
        "length": n,
        "correlations": correlations,
        "check": check,
        "periodogram": {
            "grid": grid,
            "mean": mean,
            "max": max,
            "max_over_mean": max / mean,
            "peak_frequency": peak as f64 / grid as f64,
        },
    });
    run.report(json!({ "source": loaded.source, "lags": lags, "grid": grid }), &result)?;
    let band = null_band(n);
    run.csv(
        &["lag", "value", "band"],
        correlations.gamma.iter().enumerate().skip(1).map(|(k, g)| vec![k.to_string(), f(g.re), f(band)]).collect(),
    )?;
    if let Some(path) = &a.plot {
        let rows = power.iter().enumerate().map(|(j, p)| vec![f(j as f64 / grid as f64), f(*p)]);
        run.write_file(path, flatlab::report::to_csv(&["frequency", "power"], rows).as_bytes())?;
    }
    Ok(run.finish()?)
}

fn flat_scan_cmd(mut run: Run, a: FlatScanArgs, seed: u64, jobs: usize) -> Result<()> {
    let config = FlatScanConfig { objective: a.objective, jobs, cap: a.cap, budget: a.budget, seed };
    let result = flat_scan(a.n, config)?;
    let params = json!({ "n": a.n, "objective": a.objective, "budget": a.budget, "cap": a.cap });
    run.report(params, &result)?;
    run.csv(&["sequence"], result.winners.iter().map(|w| vec![w.to_sign_string()]).collect())?;
    Ok(run.finish()?)
}
