use std::fs;

use exchangeable_car::car::CarContext;
use exchangeable_car::definetti::{
    battery, classify_type, decompose_state, eigenvalue_ratio_spectrum, reconstruct_state,
    DecomposeOptions, MixingMeasure, RecoveryOptions,
};
use exchangeable_car::gns::build_gns;
use exchangeable_car::perms::{intersecting_fraction, EXHAUSTIVE_CAP};
use exchangeable_car::random::{random_density, rng};
use exchangeable_car::states::{
    occupation_moments, oddness_decay, product_state, strong_clustering_check,
};
use exchangeable_car::{Error, ModeCount, State};
use serde_json::json;

use crate::exit::{Failure, SUCCESS};
use crate::files::{decimal, read_measure, read_state, write_measure, write_state};
use crate::{
    verify, ClassifyArgs, Cli, ClusterArgs, Command, CountArgs, DecomposeArgs, MakeStateArgs,
    OddnessArgs,
};

pub fn run(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Command::Decompose(args) => decompose(args, cli.seed),
        Command::Verify(args) => verify::run(args.n, cli.seed),
        Command::Count(args) => count(args, cli.seed),
        Command::Cluster(args) => cluster(args, cli.seed),
        Command::Classify(args) => classify(args, cli.seed),
        Command::Oddness(args) => oddness(args, cli.seed),
        Command::MakeState(args) => make_state(args, cli.seed),
    }
}

fn emit_report(report: &serde_json::Value, path: Option<&std::path::Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    if let Some(path) = path {
        fs::write(path, &text).map_err(|e| Failure::io(path, e))?;
    }
    out!("{text}");
    Ok(())
}

fn measure_json(measure: &MixingMeasure) -> serde_json::Value {
    measure
        .atoms()
        .iter()
        .map(|a| json!({ "mu": a.mu, "weight": a.weight }))
        .collect()
}

fn decompose(args: &DecomposeArgs, seed: u64) -> Result<i32, Failure> {
    let phi = read_state(&args.state)?;
    let n = phi.modes();

    if let Some(path) = &args.compare {
        let measure = read_measure(path)?;
        let psi = reconstruct_state(&measure, n)?;
        let b = battery(&phi, &psi, args.observables, seed)?;
        let moments = occupation_moments(&phi, n.get())?;
        let fitted = measure.moments(n.get());
        let residual = moments
            .as_slice()
            .iter()
            .zip(fitted.as_slice())
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        let report = json!({
            "seed": seed,
            "n_modes": n.get(),
            "mode": "compare",
            "residual": residual,
            "battery_deviation": b.max,
            "battery": b,
            "moments": moments.as_slice(),
            "measure": measure_json(&measure),
        });
        emit_report(&report, args.report.as_deref())?;
        return Ok(SUCCESS);
    }

    let opts = DecomposeOptions {
        recovery: RecoveryOptions {
            grid_size: args.grid,
            tol: args.tol,
            ..RecoveryOptions::default()
        },
        observables: args.observables,
        seed,
        ..DecomposeOptions::default()
    };
    let d = decompose_state(&phi, opts)?;
    let out = args
        .out
        .as_deref()
        .expect("clap requires --out without --compare");
    write_measure(out, &d.measure)?;
    let report = json!({
        "seed": seed,
        "n_modes": n.get(),
        "grid": args.grid,
        "tol": args.tol,
        "residual": d.residual,
        "battery_deviation": d.battery.max,
        "battery": d.battery,
        "symmetry_defect": d.symmetry_defect,
        "moments": d.moments.as_slice(),
        "measure": measure_json(&d.measure),
        "measure_file": out.display().to_string(),
    });
    emit_report(&report, args.report.as_deref())?;
    Ok(SUCCESS)
}

fn count(args: &CountArgs, seed: u64) -> Result<i32, Failure> {
    let f = intersecting_fraction(args.m, args.k, args.big_n)?;
    out!("# seed {seed}");
    out!("m,k,N,exact,estimate,abs_error");
    out!(
        "{},{},{},{},{},{}",
        args.m,
        args.k,
        args.big_n,
        decimal(f.exact),
        decimal(f.estimate),
        decimal(f.abs_error())
    );
    Ok(SUCCESS)
}

fn cluster(args: &ClusterArgs, seed: u64) -> Result<i32, Failure> {
    let phi = match (&args.state, args.mu) {
        (Some(path), _) => read_state(path)?,
        (None, Some(mu)) => {
            let n = args
                .n
                .ok_or_else(|| Failure::parse("--n is required with --mu"))?;
            product_state(mu, ModeCount::new(n)?)?
        }
        (None, None) => unreachable!("clap requires --mu or --state"),
    };
    let n = phi.modes();
    let ctx = CarContext::new(n);
    let e11 = ctx.matrix_unit(1, 1, 1)?;
    let mut rows = Vec::with_capacity(args.stages);
    for m in 1..=args.stages {
        let defect = strong_clustering_check(&phi, &e11, &e11, m)?;
        rows.push((m, defect.norm()));
    }
    out!("# seed {seed}; A = B = e_11(1); n = {n}");
    out!("m,defect");
    for (m, defect) in rows {
        out!("{m},{}", decimal(defect));
    }
    Ok(SUCCESS)
}

fn classify(args: &ClassifyArgs, seed: u64) -> Result<i32, Failure> {
    let t = classify_type(args.mu)?;
    out!("{t}");
    let n = ModeCount::new(args.n)?;
    match eigenvalue_ratio_spectrum(args.mu, n) {
        Ok(spectrum) => {
            let ratios: Vec<String> = spectrum.ratios.iter().map(|r| decimal(*r)).collect();
            out!(
                "# seed {seed}; n = {n}: {} distinct eigenvalues; consecutive ratios [{}]",
                spectrum.eigenvalues.len(),
                ratios.join(", ")
            );
        }
        Err(Error::Degenerate(msg)) => out!("# seed {seed}; no ratio witness: {msg}"),
        Err(e) => return Err(e.into()),
    }
    Ok(SUCCESS)
}

fn oddness(args: &OddnessArgs, seed: u64) -> Result<i32, Failure> {
    if let Some(&n) = args.n_list.iter().find(|&&n| n > EXHAUSTIVE_CAP) {
        return Err(Error::Capacity {
            what: "exact oddness average",
            limit: EXHAUSTIVE_CAP,
            got: n,
            hint: "",
        }
        .into());
    }
    let mu = args.mu;
    let averages = oddness_decay(
        &args.n_list,
        |ctx| ctx.annihilator(1),
        |ctx| product_state(mu, ctx.modes()),
    )?;
    out!("# seed {seed}; A = a_1; state phi_{mu}");
    out!("n,average,expected,gns_compression,bound");
    for (n, value) in averages {
        let ctx = CarContext::build(n)?;
        let phi = product_state(mu, ctx.modes())?;
        let gns = build_gns(&ctx, &phi, true)?;
        let compression = gns.ep_odd_compression(&ctx.annihilator(1)?)?;
        let expected = 1.0 / n as f64;
        out!(
            "{n},{},{},{},{}",
            decimal(value.re),
            decimal(expected),
            decimal(compression),
            decimal(expected.sqrt())
        );
    }
    Ok(SUCCESS)
}

fn make_state(args: &MakeStateArgs, seed: u64) -> Result<i32, Failure> {
    let n = ModeCount::new(args.n)?;
    let phi = if args.random {
        State::from_density(n, random_density(&mut rng(seed), n))?
    } else if let Some(mu) = args.mu {
        product_state(mu, n)?
    } else if let Some(mixture) = &args.mixture {
        reconstruct_state(&mixture.parse::<MixingMeasure>()?, n)?
    } else {
        return Err(Failure::parse(
            "one of --mu, --mixture or --random is required",
        ));
    };
    write_state(&args.out, &phi)?;
    out!("# seed {seed}; wrote {} ({} modes)", args.out.display(), n);
    Ok(SUCCESS)
}
