//! Checkpointable workloads.
//!
//! A cooperative workload runs as a sequence of *steps*. Between steps it sits
//! at a boundary where its entire live state can be serialized as a
//! [`CooperativeState`] and later restored, with the determinism contract that
//! resuming from any boundary and running to completion yields output
//! identical to an uninterrupted run — including the sequence of partial
//! results it posts.
//!
//! Three workloads are built in:
//!
//! - `counter` — counts to a limit, waiting between increments and posting a
//!   partial at every multiple of 10. Args: `[limit]` or `[limit, step_ms]`
//!   (default step 1000 ms, the canonical one-second wait).
//! - `factors` — trial-division integer factorization. Args: `[n]` or
//!   `[n, block_size]`; each block of divisor probes is one step.
//! - `matrix` — multiplies two seeded square integer matrices one output row
//!   per step. Args: `[size]` or `[size, seed]`.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigUint;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::WorkloadSpec;

#[derive(Debug, thiserror::Error)]
pub enum WorkloadError {
    #[error("unknown workload {0:?}")]
    UnknownWorkload(String),
    #[error("bad workload arguments: {0}")]
    InvalidArgs(String),
    #[error("incompatible-state: {0}")]
    IncompatibleState(String),
    #[error("workload step failed: {0}")]
    StepFailed(String),
    #[error("partial post failed: {0}")]
    PartialPost(String),
}

/// Serialized snapshot of a workload at a step boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooperativeState {
    pub workload_name: String,
    pub version: u32,
    pub payload: serde_json::Value,
}

/// Side channel a workload drives during a step: time charges and partial
/// result posts. Implementations route charges to the active clock and
/// partials to the results repository.
pub trait StepEffects {
    /// Declare that computation consumed `ms` of virtual time.
    fn charge_work(&mut self, ms: u64);
    /// Declare a deliberate wait of `ms` (sleeps for real on a real clock).
    fn charge_wait(&mut self, ms: u64);
    fn post_partial(&mut self, payload: serde_json::Value) -> Result<(), WorkloadError>;
}

/// Effects sink that records everything; used by tests and standalone mode.
#[derive(Debug, Default)]
pub struct RecordingEffects {
    pub work_ms: u64,
    pub wait_ms: u64,
    pub partials: Vec<serde_json::Value>,
}

impl StepEffects for RecordingEffects {
    fn charge_work(&mut self, ms: u64) {
        self.work_ms += ms;
    }
    fn charge_wait(&mut self, ms: u64) {
        self.wait_ms += ms;
    }
    fn post_partial(&mut self, payload: serde_json::Value) -> Result<(), WorkloadError> {
        self.partials.push(payload);
        Ok(())
    }
}

/// A resumable stepwise computation.
pub trait Workload: Send {
    fn name(&self) -> &'static str;
    /// Snapshot of the live state at the current boundary.
    fn snapshot(&self) -> CooperativeState;
    fn is_complete(&self) -> bool;
    /// Run one step: boundary to boundary. Only called while incomplete.
    fn step(&mut self, fx: &mut dyn StepEffects) -> Result<(), WorkloadError>;
    /// Final output; meaningful only once complete.
    fn result(&self) -> serde_json::Value;
}

/// Steps `w` to completion, returning its result.
pub fn run_to_completion(
    w: &mut dyn Workload,
    fx: &mut dyn StepEffects,
) -> Result<serde_json::Value, WorkloadError> {
    while !w.is_complete() {
        w.step(fx)?;
    }
    Ok(w.result())
}

type Factory =
    dyn Fn(&WorkloadSpec, Option<&CooperativeState>) -> Result<Box<dyn Workload>, WorkloadError>
        + Send
        + Sync;

/// Name → factory table. Unknown names are rejected at invocation time.
pub struct WorkloadRegistry {
    factories: HashMap<String, Box<Factory>>,
}

impl WorkloadRegistry {
    pub fn empty() -> Self {
        WorkloadRegistry {
            factories: HashMap::new(),
        }
    }

    /// The three built-in workloads.
    pub fn standard() -> Arc<Self> {
        let mut reg = Self::empty();
        reg.register("counter", |spec, state| {
            Ok(Box::new(Counter::from_spec(spec, state)?))
        });
        reg.register("factors", |spec, state| {
            Ok(Box::new(Factors::from_spec(spec, state)?))
        });
        reg.register("matrix", |spec, state| {
            Ok(Box::new(MatrixMul::from_spec(spec, state)?))
        });
        Arc::new(reg)
    }

    pub fn register<F>(&mut self, name: &str, factory: F)
    where
        F: Fn(&WorkloadSpec, Option<&CooperativeState>) -> Result<Box<dyn Workload>, WorkloadError>
            + Send
            + Sync
            + 'static,
    {
        self.factories.insert(name.to_string(), Box::new(factory));
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    /// Builds the workload named by `spec.bin`, fresh or resumed from a
    /// cooperative state snapshot.
    pub fn instantiate(
        &self,
        spec: &WorkloadSpec,
        resume: Option<&CooperativeState>,
    ) -> Result<Box<dyn Workload>, WorkloadError> {
        let factory = self
            .factories
            .get(&spec.bin)
            .ok_or_else(|| WorkloadError::UnknownWorkload(spec.bin.clone()))?;
        if let Some(state) = resume {
            if state.workload_name != spec.bin {
                return Err(WorkloadError::IncompatibleState(format!(
                    "state belongs to {:?}, spec names {:?}",
                    state.workload_name, spec.bin
                )));
            }
        }
        factory(spec, resume)
    }
}

fn check_version(state: &CooperativeState, expected: u32) -> Result<(), WorkloadError> {
    if state.version != expected {
        return Err(WorkloadError::IncompatibleState(format!(
            "state version {} != expected {}",
            state.version, expected
        )));
    }
    Ok(())
}

fn decode_payload<T: serde::de::DeserializeOwned>(
    state: &CooperativeState,
) -> Result<T, WorkloadError> {
    serde_json::from_value(state.payload.clone())
        .map_err(|e| WorkloadError::IncompatibleState(format!("bad state payload: {e}")))
}

// ---------------------------------------------------------------------------
// counter
// ---------------------------------------------------------------------------

pub const COUNTER_STATE_VERSION: u32 = 1;

/// Default per-increment wait, milliseconds.
pub const COUNTER_DEFAULT_STEP_MS: u64 = 1000;

/// Default counting limit.
pub const COUNTER_DEFAULT_LIMIT: u64 = 70;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterState {
    pub limit: u64,
    pub count: u64,
    /// Greatest multiple of 10 that has been posted; guards against replaying
    /// a partial post after a restore.
    pub last_posted: u64,
}

pub struct Counter {
    state: CounterState,
    step_ms: u64,
}

impl Counter {
    fn from_spec(
        spec: &WorkloadSpec,
        resume: Option<&CooperativeState>,
    ) -> Result<Self, WorkloadError> {
        let limit = match spec.bin_args.first() {
            None => COUNTER_DEFAULT_LIMIT,
            Some(raw) => raw
                .parse::<i64>()
                .ok()
                .filter(|&v| v >= 0)
                .ok_or_else(|| {
                    WorkloadError::InvalidArgs(format!("counter limit must be >= 0, got {raw:?}"))
                })? as u64,
        };
        let step_ms = match spec.bin_args.get(1) {
            None => COUNTER_DEFAULT_STEP_MS,
            Some(raw) => raw.parse::<u64>().map_err(|_| {
                WorkloadError::InvalidArgs(format!("counter step_ms must be an integer, got {raw:?}"))
            })?,
        };
        let state = match resume {
            None => CounterState {
                limit,
                count: 0,
                last_posted: 0,
            },
            Some(s) => {
                check_version(s, COUNTER_STATE_VERSION)?;
                decode_payload::<CounterState>(s)?
            }
        };
        if state.count > state.limit {
            return Err(WorkloadError::IncompatibleState(format!(
                "count {} beyond limit {}",
                state.count, state.limit
            )));
        }
        Ok(Counter { state, step_ms })
    }
}

impl Workload for Counter {
    fn name(&self) -> &'static str {
        "counter"
    }

    fn snapshot(&self) -> CooperativeState {
        CooperativeState {
            workload_name: "counter".into(),
            version: COUNTER_STATE_VERSION,
            payload: serde_json::to_value(&self.state).unwrap(),
        }
    }

    fn is_complete(&self) -> bool {
        self.state.count >= self.state.limit
    }

    fn step(&mut self, fx: &mut dyn StepEffects) -> Result<(), WorkloadError> {
        if self.is_complete() {
            return Err(WorkloadError::StepFailed("counter already complete".into()));
        }
        fx.charge_wait(self.step_ms);
        self.state.count += 1;
        let c = self.state.count;
        if c.is_multiple_of(10) && c > self.state.last_posted {
            fx.post_partial(serde_json::json!({ "count": c }))?;
            self.state.last_posted = c;
        }
        Ok(())
    }

    fn result(&self) -> serde_json::Value {
        serde_json::json!({ "count": self.state.count })
    }
}

// ---------------------------------------------------------------------------
// factors
// ---------------------------------------------------------------------------

pub const FACTORS_STATE_VERSION: u32 = 1;

/// Default divisor probes per step in standalone/real use. Simulated tests
/// pass a block size of 1 so chains stay small.
pub const FACTORS_DEFAULT_BLOCK: u64 = 1_000_000;

mod biguint_str {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse::<BigUint>()
            .map_err(|e| serde::de::Error::custom(format!("bad big integer {raw:?}: {e}")))
    }
}

mod biguint_vec_str {
    use num_bigint::BigUint;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for item in v {
            seq.serialize_element(&item.to_str_radix(10))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.into_iter()
            .map(|s| {
                s.parse::<BigUint>()
                    .map_err(|e| serde::de::Error::custom(format!("bad big integer {s:?}: {e}")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorsState {
    #[serde(with = "biguint_str")]
    pub n_remaining: BigUint,
    #[serde(with = "biguint_str")]
    pub divisor: BigUint,
    #[serde(with = "biguint_vec_str")]
    pub factors_found: Vec<BigUint>,
    pub work_units_done: u64,
}

pub struct Factors {
    state: FactorsState,
    block_size: u64,
}

impl Factors {
    fn from_spec(
        spec: &WorkloadSpec,
        resume: Option<&CooperativeState>,
    ) -> Result<Self, WorkloadError> {
        let raw_n = spec
            .bin_args
            .first()
            .ok_or_else(|| WorkloadError::InvalidArgs("factors requires an integer n".into()))?;
        let n = raw_n.parse::<BigUint>().map_err(|_| {
            WorkloadError::InvalidArgs(format!("factors n must be a non-negative integer, got {raw_n:?}"))
        })?;
        if n == BigUint::from(0u32) {
            return Err(WorkloadError::InvalidArgs("factors n must be >= 1".into()));
        }
        let block_size = match spec.bin_args.get(1) {
            None => FACTORS_DEFAULT_BLOCK,
            Some(raw) => raw
                .parse::<u64>()
                .ok()
                .filter(|&b| b >= 1)
                .ok_or_else(|| {
                    WorkloadError::InvalidArgs(format!("factors block_size must be >= 1, got {raw:?}"))
                })?,
        };
        let state = match resume {
            None => FactorsState {
                n_remaining: n,
                divisor: BigUint::from(2u32),
                factors_found: Vec::new(),
                work_units_done: 0,
            },
            Some(s) => {
                check_version(s, FACTORS_STATE_VERSION)?;
                decode_payload::<FactorsState>(s)?
            }
        };
        Ok(Factors { state, block_size })
    }
}

impl Workload for Factors {
    fn name(&self) -> &'static str {
        "factors"
    }

    fn snapshot(&self) -> CooperativeState {
        CooperativeState {
            workload_name: "factors".into(),
            version: FACTORS_STATE_VERSION,
            payload: serde_json::to_value(&self.state).unwrap(),
        }
    }

    fn is_complete(&self) -> bool {
        self.state.n_remaining == BigUint::from(1u32)
    }

    fn step(&mut self, fx: &mut dyn StepEffects) -> Result<(), WorkloadError> {
        if self.is_complete() {
            return Err(WorkloadError::StepFailed("factors already complete".into()));
        }
        let one = BigUint::from(1u32);
        let mut ops = 0u64;
        while ops < self.block_size && self.state.n_remaining > one {
            if &self.state.divisor * &self.state.divisor > self.state.n_remaining {
                // remainder is prime
                let rest = std::mem::replace(&mut self.state.n_remaining, one.clone());
                self.state.factors_found.push(rest);
            } else if (&self.state.n_remaining % &self.state.divisor) == BigUint::from(0u32) {
                self.state.n_remaining /= &self.state.divisor;
                self.state.factors_found.push(self.state.divisor.clone());
            } else {
                self.state.divisor += 1u32;
            }
            ops += 1;
        }
        self.state.work_units_done += 1;
        fx.charge_work(1);
        Ok(())
    }

    fn result(&self) -> serde_json::Value {
        serde_json::json!({
            "factors": self
                .state
                .factors_found
                .iter()
                .map(|f| f.to_str_radix(10))
                .collect::<Vec<_>>(),
        })
    }
}

// ---------------------------------------------------------------------------
// matrix
// ---------------------------------------------------------------------------

pub const MATRIX_STATE_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixState {
    pub size: u32,
    pub seed: u64,
    pub next_row: u32,
    pub partial_product_rows: Vec<Vec<i64>>,
    pub checksum_partial: u64,
}

pub struct MatrixMul {
    state: MatrixState,
    a: Vec<Vec<i32>>,
    b: Vec<Vec<i32>>,
}

/// Deterministic operand matrices for `matrix`: two `size`×`size` matrices of
/// 32-bit integers drawn from a seeded stream, A first, then B.
pub fn matrix_operands(size: u32, seed: u64) -> (Vec<Vec<i32>>, Vec<Vec<i32>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gen = |n: u32| -> Vec<Vec<i32>> {
        (0..n)
            .map(|_| (0..n).map(|_| rng.next_u32() as i32).collect())
            .collect()
    };
    let a = gen(size);
    let b = gen(size);
    (a, b)
}

/// One output row of A×B with 64-bit wrapping accumulation.
pub fn matrix_product_row(a: &[Vec<i32>], b: &[Vec<i32>], row: usize) -> Vec<i64> {
    let n = a.len();
    (0..n)
        .map(|j| {
            let mut acc = 0i64;
            for k in 0..n {
                acc = acc.wrapping_add((a[row][k] as i64).wrapping_mul(b[k][j] as i64));
            }
            acc
        })
        .collect()
}

impl MatrixMul {
    fn from_spec(
        spec: &WorkloadSpec,
        resume: Option<&CooperativeState>,
    ) -> Result<Self, WorkloadError> {
        let raw_size = spec
            .bin_args
            .first()
            .ok_or_else(|| WorkloadError::InvalidArgs("matrix requires a size".into()))?;
        let size = raw_size
            .parse::<i64>()
            .ok()
            .filter(|&v| (1..=1 << 16).contains(&v))
            .ok_or_else(|| {
                WorkloadError::InvalidArgs(format!("matrix size must be >= 1, got {raw_size:?}"))
            })? as u32;
        let seed = match spec.bin_args.get(1) {
            None => 0u64,
            Some(raw) => raw.parse::<u64>().map_err(|_| {
                WorkloadError::InvalidArgs(format!("matrix seed must be an integer, got {raw:?}"))
            })?,
        };
        let state = match resume {
            None => MatrixState {
                size,
                seed,
                next_row: 0,
                partial_product_rows: Vec::new(),
                checksum_partial: 0,
            },
            Some(s) => {
                check_version(s, MATRIX_STATE_VERSION)?;
                let st = decode_payload::<MatrixState>(s)?;
                if st.next_row > st.size || st.partial_product_rows.len() != st.next_row as usize {
                    return Err(WorkloadError::IncompatibleState(
                        "row progress inconsistent".into(),
                    ));
                }
                st
            }
        };
        let (a, b) = matrix_operands(state.size, state.seed);
        Ok(MatrixMul { state, a, b })
    }
}

impl Workload for MatrixMul {
    fn name(&self) -> &'static str {
        "matrix"
    }

    fn snapshot(&self) -> CooperativeState {
        CooperativeState {
            workload_name: "matrix".into(),
            version: MATRIX_STATE_VERSION,
            payload: serde_json::to_value(&self.state).unwrap(),
        }
    }

    fn is_complete(&self) -> bool {
        self.state.next_row >= self.state.size
    }

    fn step(&mut self, fx: &mut dyn StepEffects) -> Result<(), WorkloadError> {
        if self.is_complete() {
            return Err(WorkloadError::StepFailed("matrix already complete".into()));
        }
        let row = matrix_product_row(&self.a, &self.b, self.state.next_row as usize);
        for &entry in &row {
            self.state.checksum_partial = self.state.checksum_partial.wrapping_add(entry as u64);
        }
        self.state.partial_product_rows.push(row);
        self.state.next_row += 1;
        fx.charge_work(1);
        Ok(())
    }

    fn result(&self) -> serde_json::Value {
        serde_json::json!({
            "size": self.state.size,
            "checksum": self.state.checksum_partial,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(bin: &str, args: &[&str]) -> WorkloadSpec {
        WorkloadSpec::new(bin, args.iter().map(|s| s.to_string()).collect())
    }

    fn run(bin: &str, args: &[&str]) -> (serde_json::Value, RecordingEffects) {
        let reg = WorkloadRegistry::standard();
        let mut w = reg.instantiate(&spec(bin, args), None).unwrap();
        let mut fx = RecordingEffects::default();
        let result = run_to_completion(w.as_mut(), &mut fx).unwrap();
        (result, fx)
    }

    #[test]
    fn unknown_workload_rejected() {
        let reg = WorkloadRegistry::standard();
        assert!(matches!(
            reg.instantiate(&spec("nosuch", &[]), None),
            Err(WorkloadError::UnknownWorkload(_))
        ));
    }

    #[test]
    fn counter_limit_zero_completes_immediately() {
        let (result, fx) = run("counter", &["0"]);
        assert_eq!(result, serde_json::json!({"count": 0}));
        assert!(fx.partials.is_empty());
        assert_eq!(fx.wait_ms, 0);
    }

    #[test]
    fn counter_uninterrupted_posts_every_multiple_of_ten() {
        let (result, fx) = run("counter", &["70"]);
        assert_eq!(result, serde_json::json!({"count": 70}));
        let posted: Vec<u64> = fx
            .partials
            .iter()
            .map(|p| p["count"].as_u64().unwrap())
            .collect();
        assert_eq!(posted, vec![10, 20, 30, 40, 50, 60, 70]);
        assert_eq!(fx.wait_ms, 70 * COUNTER_DEFAULT_STEP_MS);
    }

    #[test]
    fn counter_rejects_negative_limit() {
        let reg = WorkloadRegistry::standard();
        assert!(matches!(
            reg.instantiate(&spec("counter", &["-3"]), None),
            Err(WorkloadError::InvalidArgs(_))
        ));
    }

    #[test]
    fn counter_resumed_mid_decade_does_not_repost() {
        let reg = WorkloadRegistry::standard();
        // run to count 55
        let mut w = reg.instantiate(&spec("counter", &["70", "1"]), None).unwrap();
        let mut fx = RecordingEffects::default();
        for _ in 0..55 {
            w.step(&mut fx).unwrap();
        }
        let snap = w.snapshot();
        drop(w);

        let mut resumed = reg
            .instantiate(&spec("counter", &["70", "1"]), Some(&snap))
            .unwrap();
        let mut fx2 = RecordingEffects::default();
        run_to_completion(resumed.as_mut(), &mut fx2).unwrap();
        let posted: Vec<u64> = fx2
            .partials
            .iter()
            .map(|p| p["count"].as_u64().unwrap())
            .collect();
        assert_eq!(posted, vec![60, 70]);
    }

    #[test]
    fn counter_resume_from_fifty_emits_fifty_one_next() {
        let reg = WorkloadRegistry::standard();
        let snap = CooperativeState {
            workload_name: "counter".into(),
            version: COUNTER_STATE_VERSION,
            payload: serde_json::json!({"limit": 70, "count": 50, "last_posted": 50}),
        };
        let mut w = reg
            .instantiate(&spec("counter", &["70", "1"]), Some(&snap))
            .unwrap();
        let mut fx = RecordingEffects::default();
        w.step(&mut fx).unwrap();
        let s: CounterState = serde_json::from_value(w.snapshot().payload).unwrap();
        assert_eq!(s.count, 51);
    }

    #[test]
    fn factors_of_one_is_empty() {
        let (result, _) = run("factors", &["1"]);
        assert_eq!(result, serde_json::json!({"factors": []}));
    }

    #[test]
    fn factors_of_twelve() {
        let (result, _) = run("factors", &["12", "1"]);
        assert_eq!(result, serde_json::json!({"factors": ["2", "2", "3"]}));
    }

    #[test]
    fn factors_rejects_zero_and_garbage() {
        let reg = WorkloadRegistry::standard();
        assert!(reg.instantiate(&spec("factors", &["0"]), None).is_err());
        assert!(reg.instantiate(&spec("factors", &["-5"]), None).is_err());
        assert!(reg.instantiate(&spec("factors", &[]), None).is_err());
    }

    #[test]
    fn factors_handles_big_inputs() {
        // 2^64 + 1 = 274177 * 67280421310721, beyond u64 but fine here
        let (result, _) = run("factors", &["18446744073709551617", "1000000"]);
        assert_eq!(
            result,
            serde_json::json!({"factors": ["274177", "67280421310721"]})
        );
    }

    #[test]
    fn matrix_identity_checksum_is_size() {
        // identity * identity has exactly `size` ones in the product
        let n = 4usize;
        let id: Vec<Vec<i32>> = (0..n)
            .map(|i| (0..n).map(|j| (i == j) as i32).collect())
            .collect();
        let mut checksum = 0u64;
        for i in 0..n {
            for &e in &matrix_product_row(&id, &id, i) {
                checksum = checksum.wrapping_add(e as u64);
            }
        }
        assert_eq!(checksum, n as u64);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn matrix_matches_naive_oracle() {
        let (result, _) = run("matrix", &["3", "42"]);
        // independent route: regenerate operands, triple loop, wrapping sums
        let (a, b) = matrix_operands(3, 42);
        let mut expected = 0u64;
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0i64;
                for k in 0..3 {
                    acc = acc.wrapping_add((a[i][k] as i64).wrapping_mul(b[k][j] as i64));
                }
                expected = expected.wrapping_add(acc as u64);
            }
        }
        assert_eq!(result["checksum"].as_u64().unwrap(), expected);
        assert_eq!(result["size"].as_u64().unwrap(), 3);
    }

    #[test]
    fn matrix_rejects_size_zero() {
        let reg = WorkloadRegistry::standard();
        assert!(reg.instantiate(&spec("matrix", &["0"]), None).is_err());
    }

    #[test]
    fn state_version_mismatch_is_incompatible() {
        let reg = WorkloadRegistry::standard();
        let snap = CooperativeState {
            workload_name: "counter".into(),
            version: 99,
            payload: serde_json::json!({"limit": 5, "count": 1, "last_posted": 0}),
        };
        assert!(matches!(
            reg.instantiate(&spec("counter", &["5"]), Some(&snap)),
            Err(WorkloadError::IncompatibleState(_))
        ));
    }

    #[test]
    fn state_from_other_workload_is_incompatible() {
        let reg = WorkloadRegistry::standard();
        let snap = CooperativeState {
            workload_name: "counter".into(),
            version: FACTORS_STATE_VERSION,
            payload: serde_json::json!({}),
        };
        assert!(reg.instantiate(&spec("factors", &["12"]), Some(&snap)).is_err());
    }

    /// Interruption invariance at the workload level: checkpoint/restore at
    /// every boundary of a short run changes nothing observable.
    #[test]
    fn interruption_at_every_boundary_is_invisible() {
        let reg = WorkloadRegistry::standard();
        for (bin, args) in [
            ("counter", vec!["23", "1"]),
            ("factors", vec!["360", "1"]),
            ("matrix", vec!["5", "7"]),
        ] {
            let s = spec(bin, &args);
            let mut base = reg.instantiate(&s, None).unwrap();
            let mut base_fx = RecordingEffects::default();
            let base_result = run_to_completion(base.as_mut(), &mut base_fx).unwrap();

            // count boundaries
            let mut probe = reg.instantiate(&s, None).unwrap();
            let mut steps = 0;
            let mut fx = RecordingEffects::default();
            while !probe.is_complete() {
                probe.step(&mut fx).unwrap();
                steps += 1;
            }

            for boundary in 0..=steps {
                let mut w = reg.instantiate(&s, None).unwrap();
                let mut fx = RecordingEffects::default();
                for _ in 0..boundary {
                    w.step(&mut fx).unwrap();
                }
                let snap = w.snapshot();
                drop(w);
                let mut resumed = reg.instantiate(&s, Some(&snap)).unwrap();
                let result = run_to_completion(resumed.as_mut(), &mut fx).unwrap();
                assert_eq!(result, base_result, "{bin} diverged at boundary {boundary}");
                assert_eq!(
                    fx.partials, base_fx.partials,
                    "{bin} partial sequence diverged at boundary {boundary}"
                );
            }
        }
    }
}
