use tailmass::bayesnet::{random_network, BayesNet};
use tailmass::contmodel::ContinuousExemplar;
use tailmass::experiment::{
    bound_csv, run_continuous, run_discrete, run_marginal_bound, ContinuousConfig, DiscreteConfig,
    NetworkSource,
};
use tailmass::gcurve::WeightMode;
use tailmass::output::{draws_csv, fit_report_csv, sample_csv};
use tailmass::tailfit::{fit_tail, select_threshold, FitConfig};

use crate::io::{ensure_dir, read_network, read_sample, write_output, CliResult, Failure};
use crate::{
    BoundArgs, ContinuousArgs, DiscreteArgs, FitArgs, GenNetArgs, Mode, NetShape, SampleArgs,
};

fn random_from(shape: &NetShape, seed: u64) -> CliResult<BayesNet> {
    Ok(random_network(
        shape.nodes,
        shape.cardinality,
        shape.max_parents,
        shape.regime.into(),
        seed,
    )?)
}

pub fn discrete_experiment(args: &DiscreteArgs) -> CliResult {
    let network = match &args.network {
        Some(path) => NetworkSource::Given(read_network(path)?),
        None => NetworkSource::Random {
            nodes: args.shape.nodes,
            cardinality: args.shape.cardinality,
            max_parents: args.shape.max_parents,
            regime: args.shape.regime.into(),
        },
    };
    let config = DiscreteConfig {
        network,
        n: args.n,
        seed: args.seed,
        threshold: args.threshold,
        robust: args.robust.into(),
        q_grid: args.q_grid.clone(),
    };
    let report = run_discrete(&config)?;
    if let Some(path) = &args.report {
        write_output(Some(path), &fit_report_csv(&report.fit))?;
    }
    write_output(args.out.as_deref(), &report.to_csv())
}

pub fn continuous_experiment(args: &ContinuousArgs) -> CliResult {
    let mut config = ContinuousConfig::new(args.lambda, args.n, args.seed);
    config.threshold = args.threshold;
    config.robust = args.robust.into();
    config.q_grid = args.q_grid.clone();
    config.p_list = args.p_list.clone();
    let report = run_continuous(&config)?;
    ensure_dir(&args.out)?;
    let files = [
        ("draws.csv", draws_csv(&report.draws)),
        ("curve.csv", report.curve_csv()),
        ("table.csv", report.table_csv()),
        ("fit.csv", fit_report_csv(&report.fit)),
    ];
    for (name, text) in files {
        write_output(Some(&args.out.join(name)), &text)?;
    }
    Ok(())
}

pub fn marginal_bound(args: &BoundArgs) -> CliResult {
    let net = match &args.network {
        Some(path) => read_network(path)?,
        None => random_from(&args.shape, args.seed)?,
    };
    let rows = run_marginal_bound(&net, &args.p0)?;
    write_output(args.out.as_deref(), &bound_csv(&rows))
}

pub fn gen_net(args: &GenNetArgs) -> CliResult {
    let net = random_from(&args.shape, args.seed)?;
    let mut json = net.to_json();
    json.push('\n');
    write_output(args.out.as_deref(), &json)
}

pub fn sample(args: &SampleArgs) -> CliResult {
    let text = match args.mode {
        Mode::Discrete => {
            let path = args
                .network
                .as_deref()
                .ok_or_else(|| Failure::config("discrete sampling needs --network"))?;
            let net = read_network(path)?;
            sample_csv(&net.logic_sample(args.n, args.seed)?)
        }
        Mode::Continuous => {
            let (draws, _) = ContinuousExemplar::new(args.lambda)?.sample(args.n, args.seed)?;
            draws_csv(&draws)
        }
    };
    write_output(args.out.as_deref(), &text)
}

pub fn fit(args: &FitArgs) -> CliResult {
    let mode: WeightMode = args.mode.into();
    let sample = read_sample(&args.input, mode)?;
    let u = select_threshold(&sample, args.threshold)?;
    let fit = fit_tail(&sample, u, &FitConfig::with_robust(args.robust.into()))?;
    write_output(args.out.as_deref(), &fit_report_csv(&fit))
}
