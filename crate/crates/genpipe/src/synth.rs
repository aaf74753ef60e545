//! Synthetic fixture corpus.
//!
//! Small arithmetic problems with known-exact answers, shaped so the mock
//! model can genuinely detect, shard, document, and solve them. Knobs
//! control how often problems share entity names (exercises the conflict
//! graph), reuse numbers across premises (exercises independence patching
//! and downstream filtering), or star generic protagonists (exercises name
//! assignment and specialization). Used by tests and demo builds; real runs
//! feed a real corpus instead.

use corpus::Problem;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Shape of the generated corpus.
#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub n_problems: usize,
    pub seed: u64,
    /// Probability a problem's protagonist is generic ("a farmer").
    pub generic_rate: f64,
    /// Probability a named problem reuses an already-used name.
    pub name_collision_rate: f64,
    /// Probability a premise repeats a number from an earlier premise.
    pub number_reuse_rate: f64,
    /// Probability a problem is multiplicative rather than additive.
    pub product_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_problems: 20,
            seed: 17,
            generic_rate: 0.2,
            name_collision_rate: 0.3,
            number_reuse_rate: 0.15,
            product_rate: 0.3,
        }
    }
}

const NAMES: &[&str] = &[
    "Kara", "Liam", "Mona", "Noah", "Olive", "Petra", "Quinn", "Rosa", "Samuel", "Tessa",
    "Ulric", "Vera", "Walt", "Xenia", "Yusuf", "Zelda", "Amara", "Boris", "Cleo", "Dmitri",
];
const ROLES: &[&str] = &["farmer", "baker", "florist", "librarian", "plumber", "tailor"];
const ITEMS: &[&str] = &[
    "apples", "oranges", "seashells", "stamps", "coins", "marbles", "tickets", "bottles",
];
const DAYS: &[&str] = &[
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday",
];

/// Generates a deterministic corpus under `config`.
pub fn generate(config: &SynthConfig) -> Vec<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut used_names: Vec<&str> = Vec::new();
    let mut problems = Vec::with_capacity(config.n_problems);
    for i in 0..config.n_problems {
        let id = format!("synth-{i:04}");
        let generic = rng.random::<f64>() < config.generic_rate;
        let item = ITEMS[rng.random_range(0..ITEMS.len())];

        let subject: String = if generic {
            format!("a {}", ROLES[rng.random_range(0..ROLES.len())])
        } else if !used_names.is_empty() && rng.random::<f64>() < config.name_collision_rate {
            used_names[rng.random_range(0..used_names.len())].to_string()
        } else {
            let fresh = NAMES[rng.random_range(0..NAMES.len())];
            if !used_names.contains(&fresh) {
                used_names.push(fresh);
            }
            fresh.to_string()
        };

        let (text, answer) = if rng.random::<f64>() < config.product_rate {
            product_problem(&mut rng, &subject, item, generic, config)
        } else {
            sum_problem(&mut rng, &subject, item, generic, config)
        };

        problems.push(Problem {
            id,
            text,
            entity_names: Default::default(),
            is_generic: false, // detection fills this in
            answer: Some(answer),
        });
    }
    problems
}

fn fresh_number(rng: &mut ChaCha8Rng, prior: &[i64], config: &SynthConfig) -> i64 {
    if !prior.is_empty() && rng.random::<f64>() < config.number_reuse_rate {
        return prior[rng.random_range(0..prior.len())];
    }
    rng.random_range(10..100)
}

/// "Kara collected 17 apples on Monday. ... How many apples did Kara
/// collect in total?"
fn sum_problem(
    rng: &mut ChaCha8Rng,
    subject: &str,
    item: &str,
    generic: bool,
    config: &SynthConfig,
) -> (String, String) {
    let k = rng.random_range(2..=4);
    let mut numbers: Vec<i64> = Vec::new();
    let mut sentences = Vec::new();
    for j in 0..k {
        let n = fresh_number(rng, &numbers, config);
        numbers.push(n);
        let who = subject_reference(subject, generic, j);
        sentences.push(format!("{who} collected {n} {item} on {}.", DAYS[j % DAYS.len()]));
    }
    let who = final_reference(subject, generic);
    let question = format!("How many {item} did {who} collect in total?");
    let answer: i64 = numbers.iter().sum();
    (
        format!("{} {question}", sentences.join(" ")),
        answer.to_string(),
    )
}

/// "Kara packed 12 boxes of oranges. Each box holds 24 oranges. How many
/// oranges did Kara pack in total?"
fn product_problem(
    rng: &mut ChaCha8Rng,
    subject: &str,
    item: &str,
    generic: bool,
    config: &SynthConfig,
) -> (String, String) {
    let a = rng.random_range(10..100i64);
    let b = fresh_number(rng, &[a], config);
    let first = subject_reference(subject, generic, 0);
    let who = final_reference(subject, generic);
    let text = format!(
        "{first} packed {a} boxes of {item}. Each box holds {b} {item}. How many {item} did {who} pack in total?"
    );
    ((text), (a * b).to_string())
}

/// First mention capitalizes the article ("A farmer"); later mentions say
/// "the farmer". Named subjects are used as-is.
fn subject_reference(subject: &str, generic: bool, sentence_index: usize) -> String {
    if !generic {
        return subject.to_string();
    }
    if sentence_index == 0 {
        let mut c = subject.chars();
        match c.next() {
            Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
            None => subject.to_string(),
        }
    } else {
        let noun = subject.split_whitespace().last().unwrap_or(subject);
        format!("the {noun}")
    }
}

fn final_reference(subject: &str, generic: bool) -> String {
    if generic {
        let noun = subject.split_whitespace().last().unwrap_or(subject);
        format!("the {noun}")
    } else {
        subject.to_string()
    }
}
