//! The `verify`, `table` and `dump` commands.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Display};
use std::fs;
use std::io::{self, Write};
use std::time::Instant;

use fakemonster_core::arith::gcd;
use fakemonster_core::denominator::{assemble_report, factor_list, DenominatorError, LatticeSeries, ProductForm, SeriesMismatch};
use fakemonster_core::eta::{
    theta_coset_formula, trace_gf_even, trace_gf_odd, twist_shape, verify_susy, CycleShape, NamedSeries, ThetaCase,
};
use fakemonster_core::lattice::{
    a_n, direct_sum, dot, e8, fixed_sublattice, orthogonal_complement, preserves, IntegralLattice, LatticeError,
    LorentzianPoint, Q,
};
use fakemonster_core::multiplicity::{evaluate_mult_table, MultError, MultRow, TwistClass};
use fakemonster_core::octonion::{
    build_twist_element, cycle_shape, matrix_order, printed_normalizer, printed_vector_action, Matrix8, Octonion,
    SpinError,
};
use fakemonster_core::series::{int_exponent, Discrepancy as SeriesDiscrepancy, Exponent, QSeries, Rational, SeriesError};
use num_traits::{One, Zero};

use crate::config::{default_height, parse_series, Cli, Command, Format, RunConfig, TableKind, Target, UsageError, UNTWISTED_HEIGHT_WARNING};
use crate::export::{q_range, render_mult_table, render_series, render_simple_roots};
use crate::parallel::parallel_product;
use crate::report::{Check, Discrepancy, Report};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_DISCREPANCY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// Anything that stops a command before it reaches a verdict.
#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Compute(String),
    Io(io::Error),
}

impl Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

macro_rules! compute_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Compute(e.to_string())
            }
        }
    )*};
}
compute_errors!(SpinError, LatticeError, SeriesError, MultError, DenominatorError);

/// Rendered output and whether every check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub text: String,
    pub passed: bool,
    pub report: Option<Report>,
}

impl Output {
    pub fn exit_code(&self) -> u8 {
        if self.passed {
            EXIT_PASS
        } else {
            EXIT_DISCREPANCY
        }
    }
}

/// Runs a parsed command line, writes its output and returns the exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = RunConfig::resolve(&cli.flags).map_err(CliError::from).and_then(|cfg| {
        let out = execute(&cli.command, &cfg)?;
        write_output(&cfg, &out.text)?;
        Ok(out)
    });
    match result {
        Ok(out) => out.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn write_output(cfg: &RunConfig, text: &str) -> io::Result<()> {
    match &cfg.out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn execute(command: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    if cfg.order == 1 && cfg.height > UNTWISTED_HEIGHT_WARNING {
        eprintln!(
            "warning: the untwisted cone grows quickly; height {} may need a lot of time and memory",
            cfg.height
        );
    }
    match command {
        Command::Verify { target } => {
            let report = verify(*target, cfg)?;
            let text = match cfg.format {
                Format::Text => report.to_string(),
                Format::Json => report.to_json(),
                Format::Csv => return Err(UsageError::Format { command: "verify", format: Format::Csv }.into()),
            };
            Ok(Output { text, passed: report.passed(), report: Some(report) })
        }
        Command::Table { kind: TableKind::Mult } => table_mult(cfg),
        Command::Table { kind: TableKind::SimpleRoots } => table_simple_roots(cfg),
        Command::Dump { series } => {
            let name = parse_series(series)?;
            let s = name.expand(int_exponent(cfg.prec));
            Ok(Output { text: render_series(name.as_str(), &s, cfg.format), passed: true, report: None })
        }
    }
}

fn params(cfg: &RunConfig, keys: &[&str]) -> BTreeMap<String, String> {
    keys.iter()
        .map(|&k| {
            let v = match k {
                "order" => cfg.order.to_string(),
                "height" => cfg.height.to_string(),
                "prec" => cfg.prec.to_string(),
                _ => unreachable!("unknown parameter {k}"),
            };
            (k.to_string(), v)
        })
        .collect()
}

pub fn verify(target: Target, cfg: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let (name, keys, checks) = match target {
        Target::Susy => ("verify susy", &["order", "prec"][..], verify_susy_checks(cfg)?),
        Target::Theta => ("verify theta", &["order", "prec"][..], verify_theta_checks(cfg)?),
        Target::Spin => ("verify spin", &["order"][..], verify_spin_checks(cfg)?),
        Target::Lattice => ("verify lattice", &["order", "prec"][..], verify_lattice_checks(cfg)?),
        Target::Mult => ("verify mult", &["height", "order"][..], verify_mult_checks(cfg)?),
        Target::Denominator => ("verify denominator", &["height", "order"][..], verify_denominator_checks(cfg)?),
    };
    Ok(Report::new(name, params(cfg, keys), checks, start.elapsed().as_millis()))
}

fn series_discrepancy(d: Option<SeriesDiscrepancy>) -> Option<Discrepancy> {
    d.map(|d| Discrepancy::new(format!("q^{}", d.exponent), d.expected, d.got))
}

/// Adds 1 at the lowest exponent carried by `s`.
fn perturbed(s: &QSeries) -> QSeries {
    let e = s.valuation().unwrap_or_else(Exponent::zero);
    s + &QSeries::monomial(Rational::one(), e, s.trunc())
}

fn series_check(name: &str, prec: i64, expected: &QSeries, got: &QSeries) -> Result<Check, CliError> {
    Ok(Check::new(name, q_range(prec), series_discrepancy(expected.first_difference(got)?)))
}

fn trace_int(m: &Matrix8) -> i64 {
    let t = m.trace();
    assert!(t.is_integer(), "trace of an integral isometry");
    i64::try_from(t.to_integer()).expect("small trace")
}

fn verify_susy_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let u = build_twist_element(cfg.order).ok_or(UsageError::UnsupportedOrder(cfg.order))?;
    let shape = cycle_shape(&u.rho_v()?)?;
    let trace_l = trace_int(&u.rho_l()?);
    let prec = int_exponent(cfg.prec);
    let even = trace_gf_even(&shape, prec);
    let mut odd = trace_gf_odd(&shape, trace_l, prec);
    if cfg.perturb {
        odd = perturbed(&odd);
    }
    let mut checks = vec![
        series_check(&format!("even and odd trace series agree for {shape}"), cfg.prec, &even, &odd)?,
        Check::new(
            "product form of the supersymmetry relation",
            q_range(cfg.prec),
            series_discrepancy(verify_susy(&shape, trace_l, prec)?.product_mismatch),
        ),
    ];
    if cfg.order == 1 {
        let fake = NamedSeries::FakeC.expand(prec).shift(Exponent::new(1, 2)).truncate(prec);
        checks.push(series_check("untwisted trace series is q^1/2 fake_c", cfg.prec, &fake, &even)?);
    }
    Ok(checks)
}

fn q_to_exponent(x: Q) -> Exponent {
    Exponent::new(i64::try_from(*x.numer()).expect("small"), i64::try_from(*x.denom()).expect("small"))
}

fn tuple<T: Display>(xs: &[T]) -> String {
    let v: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("({})", v.join(","))
}

fn twist_lattices(order: u32) -> Result<(IntegralLattice, IntegralLattice), CliError> {
    let u = build_twist_element(order).ok_or(UsageError::UnsupportedOrder(order))?;
    let e = e8();
    let fixed = fixed_sublattice(&u.rho_v()?, &e)?;
    let complement = orthogonal_complement(&fixed, &e);
    Ok((fixed, complement))
}

fn verify_theta_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let (_, complement) = twist_lattices(cfg.order)?;
    let case = match cfg.order {
        3 => ThetaCase::A2A2,
        7 => ThetaCase::A6,
        _ => return Ok(vec![Check::equal("complement of the fixed lattice is zero", "rank", "complement", 0, complement.rank())]),
    };
    let prec = int_exponent(cfg.prec);
    let group = complement.discriminant_group()?;
    let two = Q::from_integer(2);
    let mut checks = Vec::new();
    let mut seen = BTreeSet::new();
    for label in group.labels() {
        let rep = complement.shortest_in_coset(&complement.vector(&group.representative(&label)))?;
        let norm = dot(&rep, &rep);
        let class = norm - (norm / two).floor() * two;
        seen.insert(q_to_exponent(class));
        let formula = theta_coset_formula(case, q_to_exponent(class), prec).map_err(|e| CliError::Compute(e.to_string()))?;
        let mut enumerated = complement.theta_coset(&rep, prec)?;
        if cfg.perturb {
            enumerated = perturbed(&enumerated);
        }
        let name = format!("coset {} of norm class {class} mod 2", tuple(&label));
        checks.push(series_check(&name, cfg.prec, &formula, &enumerated)?);
    }
    let render = |s: &BTreeSet<Exponent>| s.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ");
    let realized: BTreeSet<Exponent> = case.realized_classes().into_iter().collect();
    checks.push(Check::equal("every norm class is realized by a coset", "norm mod 2", "classes", render(&realized), render(&seen)));
    Ok(checks)
}

fn first_matrix_difference(expected: &Matrix8, got: &Matrix8) -> Option<Discrepancy> {
    for i in 0..8 {
        for j in 0..8 {
            if expected.0[i][j] != got.0[i][j] {
                return Some(Discrepancy::new(format!("entry ({i},{j})"), &expected.0[i][j], &got.0[i][j]));
            }
        }
    }
    None
}

fn verify_spin_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let order = cfg.order;
    let u = build_twist_element(order).ok_or(UsageError::UnsupportedOrder(order))?;
    let (v, l, r) = (u.rho_v()?, u.rho_l()?, u.rho_r()?);
    let printed = printed_vector_action(order).ok_or(UsageError::UnsupportedOrder(order))?;
    let (shape, _) = twist_shape(order).ok_or(UsageError::UnsupportedOrder(order))?;
    let mut checks = Vec::new();

    let mut action = v.as_permutation();
    if cfg.perturb {
        action = action.map(|mut p| {
            p.swap(1, 2);
            p
        });
    }
    let table = match action {
        None => Some(Discrepancy::new("rho_V", "a permutation matrix", "not a permutation")),
        Some(p) => (0..8)
            .find(|&i| p[i] != printed[i])
            .map(|i| Discrepancy::new(format!("image of e{i}"), format!("e{}", printed[i]), format!("e{}", p[i]))),
    };
    checks.push(Check::new("rho_V matches the printed action", "e0 .. e7", table));
    checks.push(Check::equal(
        "normalizer of the spinor action",
        "scalar",
        "u",
        printed_normalizer(order).expect("supported order"),
        u.normalizer(fakemonster_core::octonion::Action::Left)?,
    ));
    checks.push(Check::new("rho_L = rho_V", "8x8 entries", first_matrix_difference(&v, &l)));
    checks.push(Check::new("rho_R = rho_V", "8x8 entries", first_matrix_difference(&v, &r)));
    for (name, m) in [("rho_V", &v), ("rho_L", &l), ("rho_R", &r)] {
        checks.push(Check::equal(format!("{name} is orthogonal"), "M^T M", name, true, m.is_orthogonal()));
        checks.push(Check::equal(format!("order of {name}"), "powers up to 1024", name, order, matrix_order(m, 1024)?));
        let got = cycle_shape(m).map(|s| s.to_string()).unwrap_or_else(|e| e.to_string());
        checks.push(Check::equal(format!("cycle shape of {name}"), "traces of powers", name, shape.to_string(), got));
    }
    checks.push(Check::equal("tr rho_L = tr rho_R", "trace", "u", trace_int(&l), trace_int(&r)));
    let mut triality = None;
    'pairs: for i in 0..8 {
        for j in 0..8 {
            let (a, b) = (Octonion::basis(i), Octonion::basis(j));
            let lhs = v.apply(&(&a * &b));
            let rhs = &l.apply(&a) * &r.apply(&b);
            if lhs != rhs {
                triality = Some(Discrepancy::new(format!("(e{i}, e{j})"), format!("{:?}", lhs.0), format!("{:?}", rhs.0)));
                break 'pairs;
            }
        }
    }
    checks.push(Check::new("triality rho_V(ab) = rho_L(a) rho_R(b)", "64 basis pairs", triality));
    let lattice = e8();
    for (name, m) in [("rho_V", &v), ("rho_L", &l), ("rho_R", &r)] {
        checks.push(Check::equal(format!("{name} preserves E8"), "E8 basis", name, true, preserves(m, &lattice)?));
    }
    Ok(checks)
}

fn verify_lattice_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let (fixed, complement) = twist_lattices(cfg.order)?;
    // (rank, det, level, invariants, complement rank, roots of the complement)
    let expected: (usize, i128, i128, Vec<i128>, usize, usize) = match cfg.order {
        1 => (8, 1, 1, vec![], 0, 0),
        3 => (4, 9, 3, vec![3, 3], 4, 12),
        7 => (2, 7, 7, vec![7], 6, 42),
        n => return Err(UsageError::UnsupportedOrder(n).into()),
    };
    let group = fixed.discriminant_group()?;
    let det = fixed.det();
    let group_name = |inv: &[i128]| {
        if inv.is_empty() {
            "trivial".to_string()
        } else {
            inv.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join(" x ")
        }
    };
    let mut checks = vec![
        Check::equal("rank of the fixed sublattice", "E8^u", "E8^u", expected.0, fixed.rank()),
        Check::equal("determinant of the fixed sublattice", "E8^u", "E8^u", Q::from_integer(expected.1), det),
        Check::equal("level of the fixed sublattice", "E8^u", "E8^u", expected.2, fixed.level()?),
        Check::equal("discriminant group", "E8^u*/E8^u", "E8^u", group_name(&expected.3), group_name(group.invariants())),
        Check::equal("fixed sublattice is even", "E8^u", "E8^u", true, fixed.is_even()),
        Check::equal("rank of the complement", "complement in E8", "complement", expected.4, complement.rank()),
        Check::equal("complement has the same determinant", "complement in E8", "complement", det, complement.det()),
    ];
    let zero = |l: &IntegralLattice| vec![Q::zero(); l.ambient_dim()];
    let prec = int_exponent(cfg.prec);
    let mut theta = complement.theta_coset(&zero(&complement), prec)?;
    if cfg.perturb {
        theta = perturbed(&theta);
    }
    let (reference, name) = match cfg.order {
        3 => {
            let a2 = a_n(2);
            let t = a2.theta_coset(&zero(&a2), prec)?;
            (&t * &t, "complement theta = theta_A2^2")
        }
        7 => {
            let a6 = a_n(6);
            (a6.theta_coset(&zero(&a6), prec)?, "complement theta = theta_A6")
        }
        _ => (QSeries::one(prec), "complement theta = 1"),
    };
    checks.push(series_check(name, cfg.prec, &reference, &theta)?);
    let roots = complement.enumerate_coset(&zero(&complement), Q::from_integer(2))?.iter().filter(|v| dot(v, v) == Q::from_integer(2)).count();
    checks.push(Check::equal("roots of the complement", "norm 2", "complement", expected.5, roots));
    let direct = match cfg.order {
        3 => Some(direct_sum(&a_n(2), &a_n(2))),
        7 => Some(a_n(6)),
        _ => None,
    };
    if let Some(d) = direct {
        checks.push(Check::equal("complement determinant matches the root lattice", "det", "complement", d.det(), complement.det()));
    }
    Ok(checks)
}

fn pair(p: (i128, i128)) -> String {
    format!("({}, {})", p.0, p.1)
}

fn first_row<F: Fn(&MultRow) -> Option<(String, String)>>(rows: &[MultRow], f: F) -> Option<Discrepancy> {
    rows.iter().find_map(|r| f(r).map(|(e, g)| Discrepancy::new(&r.point, e, g)))
}

/// Multiplicity of an isotropic point predicted by the cycle shapes.
fn isotropic_mult(tc: &TwistClass, divisor: i64) -> (i128, i128) {
    let d = gcd(divisor, i64::from(tc.order()));
    let (e, o) = tc.simple_root_mult(u32::try_from(d).expect("small"));
    (e.into(), o.into())
}

fn verify_mult_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let h = cfg.height;
    let tc = TwistClass::new(cfg.order, h)?;
    let range = format!("cone points with h <= {h}");
    let mut table = match evaluate_mult_table(&tc, h, None) {
        Ok(t) => t,
        Err(MultError::NonIntegralMultiplicity { point, value }) => {
            return Ok(vec![Check::new("multiplicities are integers", range, Some(Discrepancy::new(point, "an integer", value)))]);
        }
        Err(e) => return Err(e.into()),
    };
    if cfg.perturb {
        if let Some(r) = table.rows.iter_mut().find(|r| r.in_lattice) {
            r.theorem1.0 += 1;
        }
    }
    let rows = &table.rows;
    let n_rows = rows.len();
    let range = format!("{range} ({n_rows} points)");
    let lorentz = tc.lorentzian();
    Ok(vec![
        Check::new(
            "theorem multiplicity = closed form",
            range.clone(),
            first_row(rows, |r| (r.theorem1 != r.closed).then(|| (pair(r.closed), pair(r.theorem1)))),
        ),
        Check::new(
            "multiplicities are nonnegative",
            range.clone(),
            first_row(rows, |r| (r.theorem1.0 < 0 || r.theorem1.1 < 0).then(|| (">= 0".into(), pair(r.theorem1)))),
        ),
        Check::new(
            "even multiplicity = odd multiplicity",
            range.clone(),
            first_row(rows, |r| (r.theorem1.0 != r.theorem1.1).then(|| (r.theorem1.0.to_string(), r.theorem1.1.to_string()))),
        ),
        Check::new(
            "no roots off L",
            range.clone(),
            first_row(rows, |r| (!r.in_lattice && r.theorem1 != (0, 0)).then(|| ("(0, 0)".into(), pair(r.theorem1)))),
        ),
        Check::new(
            "isotropic multiplicities count cycles",
            range,
            first_row(rows, |r| {
                let iso = r.in_lattice && lorentz.norm(&r.point).is_zero();
                let want = isotropic_mult(&tc, r.divisor);
                (iso && r.theorem1 != want).then(|| (pair(want), pair(r.theorem1)))
            }),
        ),
    ])
}

fn mismatch(m: &Option<SeriesMismatch>) -> Option<Discrepancy> {
    m.as_ref().map(|m| Discrepancy::new(&m.point, m.expected, m.got))
}

fn verify_denominator_checks(cfg: &RunConfig) -> Result<Vec<Check>, CliError> {
    let h = cfg.height;
    let tc = TwistClass::new(cfg.order, h)?;
    let rank = tc.lorentzian().rank();
    let split_factors = factor_list(&tc, h, ProductForm::Split)?;
    let conv_factors = factor_list(&tc, h, ProductForm::Theorem1)?;
    let mut split = parallel_product(&split_factors, rank, h, cfg.jobs)?;
    let conv = parallel_product(&conv_factors, rank, h, cfg.jobs)?;
    if cfg.perturb {
        split.add_term(LorentzianPoint::new(vec![0; rank], 1, 0), 1);
    }
    let rep = assemble_report(&tc, h, split_factors.len(), &split, &conv)?;
    let lorentz = tc.lorentzian();
    let simple = conv_factors.iter().find_map(|f| {
        if !(lorentz.in_lattice(&f.point) && lorentz.norm(&f.point).is_zero()) {
            return None;
        }
        let want = isotropic_mult(&tc, lorentz.pairing_divisor(&f.point));
        (want != (f.m_even, f.m_odd)).then(|| Discrepancy::new(&f.point, pair(want), pair((f.m_even, f.m_odd))))
    });
    let range = format!("h <= {h}");
    Ok(vec![
        Check::new(
            "product side = sum side",
            format!("{range}, {} factors, {} product terms, {} sum terms", rep.factor_count, rep.product_terms, rep.sum_terms),
            mismatch(&rep.mismatch),
        ),
        Check::new(
            "split product = single product",
            format!("{range}, {} factors", conv_factors.len()),
            mismatch(&rep.form_mismatch),
        ),
        Check::new(
            "anisotropic cancellation",
            format!("{range}, {} points of negative norm", rep.negative_norm_points),
            mismatch(&rep.anisotropic_violation),
        ),
        Check::new("simple root multiplicities", format!("isotropic points, {range}"), simple),
    ])
}

/// Height for `table mult`: without an explicit height, a norm bound
/// raises the default so that points of that norm on the axes are reached.
pub fn table_height(cfg: &RunConfig) -> i64 {
    if cfg.height_given {
        cfg.height
    } else {
        cfg.max_norm.map_or(cfg.height, |n| n.max(default_height(cfg.order)))
    }
}

fn table_mult(cfg: &RunConfig) -> Result<Output, CliError> {
    let h = table_height(cfg);
    let tc = match cfg.max_norm {
        Some(n) => TwistClass::with_bounds(cfg.order, h, n)?,
        None => TwistClass::new(cfg.order, h)?,
    };
    let table = evaluate_mult_table(&tc, h, cfg.max_norm.map(|n| Q::from_integer(n.into())))?;
    let verdict = table.validate();
    if let Err(e) = &verdict {
        eprintln!("discrepancy: {e}");
    }
    Ok(Output { text: render_mult_table(&table, cfg.format), passed: verdict.is_ok(), report: None })
}

fn table_simple_roots(cfg: &RunConfig) -> Result<Output, CliError> {
    let (shape_v, shape_l) = spin_shapes(cfg.order)?;
    let count = |s: &CycleShape, k: u32| s.cycles().iter().filter(|(a, _)| k % a == 0).map(|(_, b)| b).sum::<u32>();
    let rows: Vec<(u32, u32, u32)> = (1..=u32::try_from(cfg.height).unwrap_or(u32::MAX))
        .map(|k| (k, count(&shape_v, k), count(&shape_l, k)))
        .collect();
    Ok(Output { text: render_simple_roots(&rows, cfg.format), passed: true, report: None })
}

fn spin_shapes(order: u32) -> Result<(CycleShape, CycleShape), CliError> {
    let u = build_twist_element(order).ok_or(UsageError::UnsupportedOrder(order))?;
    Ok((cycle_shape(&u.rho_v()?)?, cycle_shape(&u.rho_l()?)?))
}

/// Fresh product at `h ≤ H` for callers that want the series itself.
pub fn expand_product(order: u32, max_height: i64, jobs: usize) -> Result<LatticeSeries, CliError> {
    let tc = TwistClass::new(order, max_height)?;
    let factors = factor_list(&tc, max_height, ProductForm::Split)?;
    Ok(parallel_product(&factors, tc.lorentzian().rank(), max_height, jobs)?)
}
