//! Circuit text format: parser, renderer, and the builtin gate library.
//!
//! The format is line oriented. `#` starts a comment, blank lines are
//! ignored, and the first significant line must be `qubits N`. Every other
//! significant line is one operation: a case-insensitive mnemonic, its
//! target qubit indices, then any angle parameters in radians. Raw gates
//! supply an explicit matrix inline as row-major real/imaginary pairs:
//! `u1 <q> <8 numbers>` or `u2 <q1> <q2> <32 numbers>`.
//!
//! Rendering produces a canonical form that parses back to an equal circuit;
//! numbers are printed with the shortest representation that round-trips.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gate::swap_matrix;
use crate::numerics::{self, ComplexMatrix, TolerancePolicy};

/// Named gates understood by the parser and the gate library.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GateKind {
    I,
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    P,
    Cx,
    Cz,
    Cp,
    Swap,
}

impl GateKind {
    pub fn from_mnemonic(mnemonic: &str) -> Option<Self> {
        Some(match mnemonic {
            "i" => Self::I,
            "x" => Self::X,
            "y" => Self::Y,
            "z" => Self::Z,
            "h" => Self::H,
            "s" => Self::S,
            "sdg" => Self::Sdg,
            "t" => Self::T,
            "tdg" => Self::Tdg,
            "rx" => Self::Rx,
            "ry" => Self::Ry,
            "rz" => Self::Rz,
            "p" => Self::P,
            "cx" => Self::Cx,
            "cz" => Self::Cz,
            "cp" => Self::Cp,
            "swap" => Self::Swap,
            _ => return None,
        })
    }

    pub fn mnemonic(&self) -> &'static str {
        match self {
            Self::I => "i",
            Self::X => "x",
            Self::Y => "y",
            Self::Z => "z",
            Self::H => "h",
            Self::S => "s",
            Self::Sdg => "sdg",
            Self::T => "t",
            Self::Tdg => "tdg",
            Self::Rx => "rx",
            Self::Ry => "ry",
            Self::Rz => "rz",
            Self::P => "p",
            Self::Cx => "cx",
            Self::Cz => "cz",
            Self::Cp => "cp",
            Self::Swap => "swap",
        }
    }

    pub fn num_targets(&self) -> usize {
        match self {
            Self::Cx | Self::Cz | Self::Cp | Self::Swap => 2,
            _ => 1,
        }
    }

    pub fn num_params(&self) -> usize {
        match self {
            Self::Rx | Self::Ry | Self::Rz | Self::P | Self::Cp => 1,
            _ => 0,
        }
    }

    /// The gate's unitary matrix. For two-qubit gates the first target is
    /// the high bit of the index, so `cx` has the control first.
    pub fn matrix(&self, params: &[f64]) -> Result<ComplexMatrix> {
        if params.len() != self.num_params() {
            return Err(Error::Gate(format!(
                "{} takes {} parameter(s), got {}",
                self.mnemonic(),
                self.num_params(),
                params.len()
            )));
        }
        let c = Complex64::new;
        let m = match self {
            Self::I => ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            Self::X => ndarray::array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
            Self::Y => ndarray::array![[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
            Self::Z => ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
            Self::H => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                ndarray::array![[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
            }
            Self::S => ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]],
            Self::Sdg => {
                ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]]
            }
            Self::T => phase_gate(std::f64::consts::FRAC_PI_4),
            Self::Tdg => phase_gate(-std::f64::consts::FRAC_PI_4),
            Self::Rx => {
                let (sin, cos) = (params[0] / 2.0).sin_cos();
                ndarray::array![[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]]
            }
            Self::Ry => {
                let (sin, cos) = (params[0] / 2.0).sin_cos();
                ndarray::array![[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]]
            }
            Self::Rz => {
                let half = params[0] / 2.0;
                ndarray::array![
                    [Complex64::from_polar(1.0, -half), c(0.0, 0.0)],
                    [c(0.0, 0.0), Complex64::from_polar(1.0, half)]
                ]
            }
            Self::P => phase_gate(params[0]),
            Self::Cx => {
                let mut m = ComplexMatrix::zeros((4, 4));
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 3)] = c(1.0, 0.0);
                m[(3, 2)] = c(1.0, 0.0);
                m
            }
            Self::Cz => {
                let mut m = ComplexMatrix::zeros((4, 4));
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 2)] = c(1.0, 0.0);
                m[(3, 3)] = c(-1.0, 0.0);
                m
            }
            Self::Cp => {
                let mut m = ComplexMatrix::zeros((4, 4));
                m[(0, 0)] = c(1.0, 0.0);
                m[(1, 1)] = c(1.0, 0.0);
                m[(2, 2)] = c(1.0, 0.0);
                m[(3, 3)] = Complex64::from_polar(1.0, params[0]);
                m
            }
            Self::Swap => swap_matrix(),
        };
        Ok(m)
    }
}

fn phase_gate(angle: f64) -> ComplexMatrix {
    ndarray::array![
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, angle)]
    ]
}

/// Looks up a builtin gate matrix by mnemonic.
pub fn builtin_gate(mnemonic: &str, params: &[f64]) -> Result<ComplexMatrix> {
    let kind = GateKind::from_mnemonic(&mnemonic.to_ascii_lowercase())
        .ok_or_else(|| Error::Gate(format!("unknown mnemonic {mnemonic:?}")))?;
    kind.matrix(params)
}

/// What an operation applies: a named gate or an inline raw matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum OpKind {
    Named(GateKind),
    Raw1(ComplexMatrix),
    Raw2(ComplexMatrix),
}

/// One circuit operation with its targets and parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitOp {
    pub kind: OpKind,
    pub targets: Vec<usize>,
    pub params: Vec<f64>,
}

impl CircuitOp {
    /// The operation's unitary matrix.
    pub fn matrix(&self) -> Result<ComplexMatrix> {
        match &self.kind {
            OpKind::Named(kind) => kind.matrix(&self.params),
            OpKind::Raw1(m) | OpKind::Raw2(m) => Ok(m.clone()),
        }
    }

    pub fn mnemonic(&self) -> &'static str {
        match &self.kind {
            OpKind::Named(kind) => kind.mnemonic(),
            OpKind::Raw1(_) => "u1",
            OpKind::Raw2(_) => "u2",
        }
    }
}

/// A parsed circuit: qubit count plus an ordered list of operations.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub n: usize,
    pub ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("circuit needs at least one qubit".into()));
        }
        Ok(Self { n, ops: Vec::new() })
    }

    /// Appends a named gate, validating targets and parameter count.
    pub fn push_named(&mut self, kind: GateKind, targets: &[usize], params: &[f64]) -> Result<()> {
        let op = CircuitOp {
            kind: OpKind::Named(kind),
            targets: targets.to_vec(),
            params: params.to_vec(),
        };
        validate_op(&op, self.n).map_err(Error::Gate)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends a raw single-qubit gate, checking unitarity.
    pub fn push_raw1(&mut self, matrix: ComplexMatrix, target: usize) -> Result<()> {
        let op = CircuitOp {
            kind: OpKind::Raw1(matrix),
            targets: vec![target],
            params: Vec::new(),
        };
        validate_op(&op, self.n).map_err(Error::Gate)?;
        self.ops.push(op);
        Ok(())
    }

    /// Appends a raw two-qubit gate, checking unitarity.
    pub fn push_raw2(&mut self, matrix: ComplexMatrix, t1: usize, t2: usize) -> Result<()> {
        let op = CircuitOp {
            kind: OpKind::Raw2(matrix),
            targets: vec![t1, t2],
            params: Vec::new(),
        };
        validate_op(&op, self.n).map_err(Error::Gate)?;
        self.ops.push(op);
        Ok(())
    }
}

/// Checks an operation against the circuit width; returns a plain message so
/// callers can attach their own context.
fn validate_op(op: &CircuitOp, n: usize) -> std::result::Result<(), String> {
    let (want_targets, want_params) = match &op.kind {
        OpKind::Named(kind) => (kind.num_targets(), kind.num_params()),
        OpKind::Raw1(_) => (1, 0),
        OpKind::Raw2(_) => (2, 0),
    };
    if op.targets.len() != want_targets {
        return Err(format!(
            "{} takes {want_targets} target(s), got {}",
            op.mnemonic(),
            op.targets.len()
        ));
    }
    if op.params.len() != want_params {
        return Err(format!(
            "{} takes {want_params} parameter(s), got {}",
            op.mnemonic(),
            op.params.len()
        ));
    }
    for &t in &op.targets {
        if t >= n {
            return Err(format!("qubit index {t} out of range for {n} qubits"));
        }
    }
    if op.targets.len() == 2 && op.targets[0] == op.targets[1] {
        return Err(format!(
            "targets must be distinct, both are {}",
            op.targets[0]
        ));
    }
    if op.params.iter().any(|p| !p.is_finite()) {
        return Err("parameters must be finite".into());
    }
    match &op.kind {
        OpKind::Raw1(m) | OpKind::Raw2(m) => {
            let want = if matches!(op.kind, OpKind::Raw1(_)) {
                2
            } else {
                4
            };
            if m.dim() != (want, want) {
                return Err(format!(
                    "raw matrix must be {want}x{want}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                ));
            }
            match numerics::check_unitary(m, &TolerancePolicy::default()) {
                Ok(true) => {}
                Ok(false) => return Err("raw matrix is not unitary".into()),
                Err(_) => return Err("raw matrix entries must be finite".into()),
            }
        }
        OpKind::Named(_) => {}
    }
    Ok(())
}

/// Parses circuit text, reporting the 1-based line of the first problem.
pub fn parse(text: &str) -> Result<Circuit> {
    let mut n: Option<usize> = None;
    let mut ops = Vec::new();
    let mut last_line = 0usize;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let mnemonic = tokens[0].to_ascii_lowercase();
        match n {
            None => {
                if mnemonic != "qubits" {
                    return Err(Error::Parse {
                        line,
                        msg: format!("expected `qubits <count>` header, found {:?}", tokens[0]),
                    });
                }
                if tokens.len() != 2 {
                    return Err(Error::Parse {
                        line,
                        msg: format!(
                            "qubits header takes exactly one argument, got {}",
                            tokens.len() - 1
                        ),
                    });
                }
                let count: usize = tokens[1].parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("malformed qubit count {:?}", tokens[1]),
                })?;
                if count == 0 {
                    return Err(Error::Parse {
                        line,
                        msg: "qubit count must be at least 1".into(),
                    });
                }
                n = Some(count);
            }
            Some(count) => ops.push(parse_op(&mnemonic, &tokens[1..], count, line)?),
        }
    }
    match n {
        Some(n) => Ok(Circuit { n, ops }),
        None => Err(Error::Parse {
            line: last_line.max(1),
            msg: "missing `qubits <count>` header".into(),
        }),
    }
}

fn parse_op(mnemonic: &str, args: &[&str], n: usize, line: usize) -> Result<CircuitOp> {
    let fail = |msg: String| Error::Parse { line, msg };
    let parse_target = |token: &str| -> Result<usize> {
        token
            .parse::<usize>()
            .map_err(|_| fail(format!("malformed qubit index {token:?}")))
    };
    let parse_number = |token: &str| -> Result<f64> {
        let value: f64 = token
            .parse()
            .map_err(|_| fail(format!("malformed number {token:?}")))?;
        if !value.is_finite() {
            return Err(fail(format!("number {token:?} is not finite")));
        }
        Ok(value)
    };

    let op = if mnemonic == "u1" || mnemonic == "u2" {
        let (num_targets, dim) = if mnemonic == "u1" {
            (1usize, 2usize)
        } else {
            (2, 4)
        };
        let num_entries = 2 * dim * dim;
        if args.len() != num_targets + num_entries {
            return Err(fail(format!(
                "{mnemonic} takes {num_targets} target(s) and {num_entries} matrix numbers, got {} arguments",
                args.len()
            )));
        }
        let targets: Vec<usize> = args[..num_targets]
            .iter()
            .map(|t| parse_target(t))
            .collect::<Result<_>>()?;
        let numbers: Vec<f64> = args[num_targets..]
            .iter()
            .map(|t| parse_number(t))
            .collect::<Result<_>>()?;
        let matrix = ComplexMatrix::from_shape_fn((dim, dim), |(r, c)| {
            let at = 2 * (r * dim + c);
            Complex64::new(numbers[at], numbers[at + 1])
        });
        let kind = if mnemonic == "u1" {
            OpKind::Raw1(matrix)
        } else {
            OpKind::Raw2(matrix)
        };
        CircuitOp {
            kind,
            targets,
            params: Vec::new(),
        }
    } else if let Some(kind) = GateKind::from_mnemonic(mnemonic) {
        let want = kind.num_targets() + kind.num_params();
        if args.len() != want {
            return Err(fail(format!(
                "{} takes {} target(s) and {} parameter(s), got {} arguments",
                kind.mnemonic(),
                kind.num_targets(),
                kind.num_params(),
                args.len()
            )));
        }
        let targets: Vec<usize> = args[..kind.num_targets()]
            .iter()
            .map(|t| parse_target(t))
            .collect::<Result<_>>()?;
        let params: Vec<f64> = args[kind.num_targets()..]
            .iter()
            .map(|t| parse_number(t))
            .collect::<Result<_>>()?;
        CircuitOp {
            kind: OpKind::Named(kind),
            targets,
            params,
        }
    } else {
        return Err(fail(format!("unknown mnemonic {mnemonic:?}")));
    };
    validate_op(&op, n).map_err(fail)?;
    Ok(op)
}

/// Renders a circuit to its canonical text form, the inverse of [`parse`].
pub fn render(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.n);
    for op in &circuit.ops {
        out.push_str(op.mnemonic());
        for t in &op.targets {
            let _ = write!(out, " {t}");
        }
        match &op.kind {
            OpKind::Named(_) => {
                for p in &op.params {
                    let _ = write!(out, " {p}");
                }
            }
            OpKind::Raw1(m) | OpKind::Raw2(m) => {
                for z in m.iter() {
                    let _ = write!(out, " {} {}", z.re, z.im);
                }
            }
        }
        out.push('\n');
    }
    out
}
