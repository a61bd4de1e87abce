use std::path::Path;

use aggregation_games::game::{AggregationGame, GameTable};
use aggregation_games::model::{acceptor_set, is_systematic, Aggregator, Ballot, BallotProfile, Coalition};
use aggregation_games::negotiation::{
    check_surviving_capped, grid_spe_oracle_capped, paradox_analysis_capped, payoff_bound_m, EndogenousGame,
    GridSpec, Selection, SurvivalStatus, DEFAULT_GRID_CAP,
};
use aggregation_games::rational::parse_rational;
use aggregation_games::suites::{run_suite, Mutant, Suite};
use aggregation_games::Q;

use crate::error::CliError;
use crate::gamefile::{parse_game_file, GameFile};
use crate::report::{digest, Report, Section};

/// A game file together with the digest of its bytes.
#[derive(Debug, Clone)]
pub struct Input {
    pub file: GameFile,
    pub digest: String,
}

impl Input {
    pub fn from_text(text: &str, cap: usize) -> Result<Self, CliError> {
        Ok(Self {
            file: parse_game_file(text, cap)?,
            digest: digest(text.as_bytes()),
        })
    }

    pub fn load(path: &Path, cap: usize) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_text(&text, cap).map_err(|e| CliError::File {
            path: path.display().to_string(),
            source: Box::new(e),
        })
    }

    fn game(&self) -> &AggregationGame {
        &self.file.game
    }

    /// `--profile` if given, else the file's `profile` line.
    fn profile(&self, flag: Option<&str>) -> Result<Option<BallotProfile>, CliError> {
        match flag {
            Some(text) => BallotProfile::parse(&self.game().structure(), text)
                .map(Some)
                .map_err(|e| CliError::Usage(format!("--profile: {e}"))),
            None => Ok(self.file.profile.clone()),
        }
    }
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn list_or_dash(items: Vec<String>) -> String {
    if items.is_empty() {
        "-".into()
    } else {
        items.join(",")
    }
}

fn compact(p: &BallotProfile) -> String {
    p.grouped()
}

/// `N`, `{1,3}` or a bare `1,3`.
pub fn parse_coalition(text: &str, n: usize) -> Result<Coalition, CliError> {
    let text = text.trim();
    let wrapped;
    let text = if text == "N" || text.starts_with('{') {
        text
    } else {
        wrapped = format!("{{{text}}}");
        &wrapped
    };
    Coalition::parse(text, n).map_err(|e| CliError::Usage(format!("--coalition: {e}")))
}

/// Comma-separated amounts; `default` is `0,M,2M,3M`, and `kM` means `k`
/// times the game's payoff bound.
pub fn parse_grid(text: &str, game: &AggregationGame) -> Result<GridSpec, CliError> {
    if text.trim() == "default" {
        return Ok(GridSpec::default_for(game)?);
    }
    let m = payoff_bound_m(game)?;
    let amounts = text
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.strip_suffix('M') {
                Some("") => Ok(m),
                Some(k) => parse_rational(k).map(|k| k * m),
                None => parse_rational(t),
            }
            .map_err(|e| CliError::Usage(format!("--grid: {e}")))
        })
        .collect::<Result<Vec<Q>, _>>()?;
    Ok(GridSpec::with_amounts(game, amounts)?)
}

pub fn aggregate(input: &Input, profile: Option<&str>) -> Result<Report, CliError> {
    let game = input.game();
    let p = input
        .profile(profile)?
        .ok_or_else(|| CliError::Usage("no profile: pass --profile or add a `profile` line".into()))?;
    let outcome = game.outcome(&p)?;
    let mut report = Report::new("aggregate", input.digest.clone());
    report.summary.push(format!("profile {}", compact(&p)));
    report.summary.push(format!("rule {}", game.aggregator()));
    report.summary.push(format!("outcome {}", outcome.spaced()));
    let mut s = Section::new(vec!["issue", "name", "outcome", "acceptors"]);
    for j in 0..game.issues() {
        s.push(vec![
            (j + 1).to_string(),
            game.names().name(j),
            (outcome.get(j) as u8).to_string(),
            acceptor_set(&p, j)?.to_string(),
        ]);
    }
    report.sections.push(s);
    Ok(report)
}

pub fn nash(input: &Input, coalitions: &[String], cap: usize) -> Result<Report, CliError> {
    let game = input.game();
    let n = game.voters();
    let queried = if coalitions.is_empty() {
        vec![Coalition::grand(n)]
    } else {
        coalitions.iter().map(|c| parse_coalition(c, n)).collect::<Result<_, _>>()?
    };
    let table = GameTable::new(game, cap)?;
    let ne = table.nash_indices();
    let mut report = Report::new("nash", input.digest.clone());
    report.summary.push(format!(
        "{} pure equilibria among {} profiles",
        ne.len(),
        table.space().size()
    ));
    let mut s = Section::new(vec!["profile", "outcome", "flags", "truthful", "efficient", "totally-inefficient"]);
    for idx in ne {
        let c = table.classify(idx, &queried);
        let truthful: Vec<String> = queried
            .iter()
            .filter(|q| q.is_subset(&c.truthful_for))
            .map(|q| q.label(n))
            .collect();
        let efficient: Vec<String> = c.efficient_for.iter().filter(|e| e.1).map(|e| e.0.label(n)).collect();
        let inefficient: Vec<String> =
            c.totally_inefficient_for.iter().filter(|e| e.1).map(|e| e.0.label(n)).collect();
        let mut flags = vec!["NE".to_string()];
        flags.extend(truthful.iter().map(|l| format!("truthful:{l}")));
        flags.extend(efficient.iter().map(|l| format!("efficient:{l}")));
        flags.extend(inefficient.iter().map(|l| format!("totally-inefficient:{l}")));
        s.push(vec![
            compact(&c.profile),
            c.outcome.to_string(),
            flags.join(" "),
            list_or_dash(truthful),
            list_or_dash(efficient),
            list_or_dash(inefficient),
        ]);
    }
    report.sections.push(s);
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct SurviveOptions {
    pub profile: Option<String>,
    pub grid: Option<String>,
    pub selection: Selection,
    pub witness: bool,
}

fn status_detail(status: &SurvivalStatus, n: usize) -> String {
    match status {
        SurvivalStatus::Certified { report, .. } => {
            format!("commitment; {} equilibria after transfer", report.equilibria)
        }
        SurvivalStatus::Refuted {
            deviator,
            coalition,
            target,
            ..
        } => format!("voter {} for {} toward {}", deviator + 1, coalition.label(n), target),
        SurvivalStatus::Unknown { reason } => reason.clone(),
    }
}

pub fn survive(input: &Input, opts: &SurviveOptions, cap: usize) -> Result<Report, CliError> {
    let game = input.game();
    let n = game.voters();
    let endo = EndogenousGame::new(game.clone())?;
    let profiles: Vec<BallotProfile> = match opts.profile.as_deref() {
        Some(text) => vec![input.profile(Some(text))?.expect("flag given")],
        None => {
            let table = GameTable::new(game, cap)?;
            table.nash_profiles()
        }
    };
    let on_path = match &opts.grid {
        None => None,
        Some(text) => {
            let mut grid = parse_grid(text, game)?;
            grid.selection = opts.selection;
            Some(grid_spe_oracle_capped(&endo, &grid, cap, DEFAULT_GRID_CAP)?.on_path())
        }
    };
    let mut report = Report::new("survive", input.digest.clone());
    let mut columns = vec!["profile", "outcome", "status", "detail", "witness-entries"];
    if on_path.is_some() {
        columns.push("grid-on-path");
    }
    let mut s = Section::new(columns);
    let mut witnesses = Section::new(vec!["profile", "payer", "transfer-profile", "payee", "amount"]);
    let mut counts = [0usize; 3];
    for p in &profiles {
        let status = check_surviving_capped(&endo, p, cap)?;
        counts[match status {
            SurvivalStatus::Certified { .. } => 0,
            SurvivalStatus::Refuted { .. } => 1,
            SurvivalStatus::Unknown { .. } => 2,
        }] += 1;
        let entries = status.witness().map_or(0, |w| w.len());
        let mut row = vec![
            compact(p),
            game.outcome(p)?.to_string(),
            status.label().to_string(),
            status_detail(&status, n),
            entries.to_string(),
        ];
        if let Some(set) = &on_path {
            row.push(yes_no(set.contains(&p.index())));
        }
        s.push(row);
        if opts.witness {
            for line in status.witness().map(|w| w.to_lines()).unwrap_or_default() {
                let mut record = vec![compact(p)];
                record.extend(line.split(' ').map(str::to_string));
                witnesses.push(record);
            }
        }
    }
    report.summary.push(format!(
        "{} profiles: {} CERTIFIED, {} REFUTED, {} UNKNOWN",
        profiles.len(),
        counts[0],
        counts[1],
        counts[2]
    ));
    report.sections.push(s);
    if opts.witness {
        report.sections.push(witnesses);
    }
    Ok(report)
}

pub fn paradox(input: &Input, cap: usize) -> Result<Report, CliError> {
    let game = input.game();
    let ic = input
        .file
        .constraint
        .as_ref()
        .ok_or_else(|| CliError::Usage("paradox needs a `constraint` line in the game file".into()))?;
    let analysis = paradox_analysis_capped(game, ic, cap)?;
    let mut report = Report::new("paradox", input.digest.clone());
    report.summary.push(format!("constraint {}", ic.render(game.names())));
    report.summary.push(format!("responsible voters {}", analysis.responsible));
    report.summary.push(format!("goals jointly consistent: {}", yes_no(analysis.consistent)));
    report.summary.push(format!(
        "surviving equilibria guaranteed admissible: {}",
        yes_no(analysis.guaranteed)
    ));
    let mut s = Section::new(vec!["profile", "outcome", "outcome-admissible", "ballots-admissible", "paradox", "status"]);
    let mut paradoxes = 0;
    for row in &analysis.rows {
        paradoxes += row.is_paradox() as usize;
        let status = match &row.status {
            Ok(st) => st.label().to_string(),
            Err(e) => format!("n/a ({e})"),
        };
        s.push(vec![
            compact(&row.profile),
            row.outcome.to_string(),
            yes_no(row.outcome_admissible),
            row.ballots_admissible.iter().map(|&a| if a { "1" } else { "0" }).collect(),
            yes_no(row.is_paradox()),
            status,
        ]);
    }
    report.summary.push(format!(
        "{} equilibria, {} with admissible ballots and an inadmissible outcome",
        analysis.rows.len(),
        paradoxes
    ));
    report.sections.push(s);
    Ok(report)
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    pub seed: u64,
    pub count: Option<usize>,
    pub suite: Option<String>,
    pub mutant: Option<Mutant>,
}

/// Runs the randomized suites; with a game file, also checks that truthful
/// ballots of that game are weakly dominant whenever the game is constant
/// with cube goals under a systematic monotone rule.
pub fn verify(input: Option<&Input>, opts: &VerifyOptions, cap: usize) -> Result<Report, CliError> {
    let suites: Vec<Suite> = match opts.suite.as_deref() {
        None => Suite::ALL.to_vec(),
        Some(name) => vec![Suite::parse(name).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            CliError::Usage(format!("unknown suite `{name}`; expected one of {}", names.join(", ")))
        })?],
    };
    let key = format!("seed={} count={:?} suite={:?}", opts.seed, opts.count, opts.suite);
    let mut report = Report::new("verify", input.map_or_else(|| digest(key.as_bytes()), |i| i.digest.clone()));
    report.summary.push(format!("seed {}", opts.seed));
    let mut s = Section::new(vec!["suite", "status", "instances", "checks", "failures", "first-witness"]);
    for suite in suites {
        let r = run_suite(suite, opts.seed, opts.count.unwrap_or(suite.default_count()), opts.mutant)?;
        report.failed |= !r.passed();
        s.push(vec![
            suite.name().into(),
            r.status().into(),
            r.instances.to_string(),
            r.checks.to_string(),
            r.failure_count.to_string(),
            r.failures.first().cloned().unwrap_or_else(|| "-".into()),
        ]);
        for w in r.failures.iter().skip(1) {
            report.notes.push(format!("{}: {w}", suite.name()));
        }
        for note in &r.notes {
            report.notes.push(format!("{}: {note}", suite.name()));
        }
    }
    if let Some(input) = input {
        s.push(game_dominance_row(input.game(), cap, &mut report.failed)?);
    }
    report.sections.push(s);
    Ok(report)
}

fn game_dominance_row(game: &AggregationGame, cap: usize, failed: &mut bool) -> Result<Vec<String>, CliError> {
    let applicable = game.all_cubes()
        && matches!(game.payoffs(), aggregation_games::game::PayoffTable::Constant(_))
        && !matches!(game.aggregator(), Aggregator::GeneralTable(_))
        && is_systematic(game.aggregator(), &game.structure(), cap)?.is_systematic();
    if !applicable {
        return Ok(vec![
            "game-file".into(),
            "skipped".into(),
            "0".into(),
            "0".into(),
            "0".into(),
            "not a constant cube game under a systematic rule".into(),
        ]);
    }
    let table = GameTable::new(game, cap)?;
    let m = game.issues();
    let mut checks = 0;
    let mut failures = Vec::new();
    for i in 0..game.voters() {
        for code in 0..1u64 << m {
            let b = Ballot::from_code(code, m);
            if !game.goal(i).holds(&b) {
                continue;
            }
            checks += 1;
            if let Some(w) = table.weak_dominance_witness(i, code) {
                failures.push(format!("voter {} ballot {} beaten by {}", i + 1, b, w.alternative));
            }
        }
    }
    *failed |= !failures.is_empty();
    Ok(vec![
        "game-file".into(),
        if failures.is_empty() { "pass" } else { "fail" }.into(),
        "1".into(),
        checks.to_string(),
        failures.len().to_string(),
        failures.first().cloned().unwrap_or_else(|| "-".into()),
    ])
}
