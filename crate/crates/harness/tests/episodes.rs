//! End-to-end episodes against a real in-process tool environment.

use std::sync::Arc;

use genpipe::{Decimal, DocMetadata, Document, Task};
use harness::{
    oracle_doc_ids, run_episode, run_eval, score, AgentAdapter, AgentMove, Conversation,
    EpisodeConfig, EvalConfig, EvalSetting, HarnessError, OracleAgent, ScriptedAgent,
};
use serde_json::json;
use store::{index_documents, HashedBowEmbedder};
use toolsrv::{
    Engine, EngineConfig, LocalTransport, ToolSchema, ToolSetting, ToolTransport,
};

struct Fixture {
    tasks: Vec<Task>,
    documents: Vec<Document>,
}

fn fixture() -> Fixture {
    let specs: [(&str, i64, &[&str]); 6] = [
        (
            "p0",
            46,
            &[
                "Nancy carried fourteen hardcover novels to the checkout desk at Pine Street Books.",
                "Nancy added thirty-two paperback mysteries from the clearance shelf near the window.",
            ],
        ),
        (
            "p1",
            12,
            &[
                "Orlando packed three crates of oranges onto the delivery truck before sunrise.",
                "Each crate from the Hillside orchard holds exactly four ripe oranges this season.",
            ],
        ),
        (
            "p2",
            90,
            &[
                "Priya cycled thirty kilometers along the river trail on Saturday morning.",
                "On Sunday Priya doubled her Saturday distance despite the strong headwind.",
            ],
        ),
        (
            "p3",
            8,
            &[
                "Malik repaired five antique clocks in his workshop during the first week.",
                "Three more clocks arrived from the auction house needing new mainsprings.",
            ],
        ),
        (
            "p4",
            27,
            &[
                "The bakery on Elm Avenue sold nine trays of cinnamon rolls before noon.",
                "Every tray at that bakery holds exactly three warm cinnamon rolls.",
            ],
        ),
        (
            "p5",
            15,
            &[
                "Greta planted ten tulip bulbs along the fence behind the cottage.",
                "Half as many daffodil bulbs went into the bed beside the gate.",
            ],
        ),
    ];
    let mut tasks = Vec::new();
    let mut documents = Vec::new();
    for (id, gold, premises) in specs {
        tasks.push(Task {
            source_problem_id: id.to_string(),
            question: format!("Combined total for {id}?"),
            premises: premises.iter().map(|s| s.to_string()).collect(),
            gold_answer: Decimal::from_int(gold),
            timestamp: "1991-02".parse().unwrap(),
        });
        for (j, premise) in premises.iter().enumerate() {
            documents.push(Document {
                doc_id: format!("{id}/d{j}"),
                content: premise.to_string(),
                metadata: DocMetadata {
                    timestamp: "1991-02".parse().unwrap(),
                    names: vec!["Someone".to_string()],
                    doc_type: "Diary".to_string(),
                },
                source: (id.to_string(), j),
                anonymized: false,
            });
        }
    }
    Fixture { tasks, documents }
}

fn engine(fx: &Fixture, setting: ToolSetting, max_rounds: u32) -> Arc<Engine> {
    let embedder = Arc::new(HashedBowEmbedder::default());
    let index = index_documents(&fx.documents, embedder.as_ref()).unwrap();
    Arc::new(Engine::new(
        index,
        embedder,
        fx.tasks.iter().map(|t| t.source_problem_id.clone()),
        EngineConfig { setting, max_rounds },
    ))
}

#[test]
fn an_immediate_answer_needs_no_tools() {
    let fx = fixture();
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
    let mut agent = ScriptedAgent::new([AgentMove::answer("done already\n#### 46")]);
    let trace = run_episode(&fx.tasks[0], &transport, &mut agent, &EpisodeConfig::default()).unwrap();

    assert!(trace.steps.is_empty());
    assert_eq!(trace.answer_events.len(), 1);
    let oracle = oracle_doc_ids(&fx.tasks[0], &fx.documents);
    let s = score(&trace, &fx.tasks[0].gold_answer, &oracle);
    assert!(s.acc && s.ff);
    assert_eq!(s.sr, 0);
    assert!(!s.sc);
    assert_eq!(s.er, 0);
}

#[test]
fn oracle_agents_sweep_the_whole_suite() {
    let fx = fixture();
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
    let config = EvalConfig {
        setting: EvalSetting::ZeroShot,
        seeds: vec![0, 1],
        max_rounds: 50,
        workers: 2,
    };
    let (episodes, report) = run_eval(
        &fx.tasks,
        &fx.documents,
        &transport,
        "oracle",
        &|task, _seed| Box::new(OracleAgent::new(task, &fx.documents)),
        &config,
    )
    .unwrap();

    assert_eq!(episodes.len(), 12);
    // Order is seed-major, then task order.
    let ids: Vec<(u64, &str)> = episodes
        .iter()
        .map(|e| (e.seed, e.trace.task_id.as_str()))
        .collect();
    let expected: Vec<(u64, &str)> = [0u64, 1]
        .iter()
        .flat_map(|&s| (0..6).map(move |i| (s, ["p0", "p1", "p2", "p3", "p4", "p5"][i])))
        .collect();
    assert_eq!(ids, expected);
    for e in &episodes {
        assert!(e.score.acc, "oracle missed task {}", e.trace.task_id);
        assert!(e.score.sc, "oracle lacks coverage on {}", e.trace.task_id);
        assert_eq!(e.score.sr, 2);
        let cover = e.score.coverage_step.expect("covered");
        assert!(cover >= 1 && cover <= 2);
        assert_eq!(e.score.er, 2 - cover);
        assert!(e.trace.failure.is_none());
    }
    assert_eq!(report.aggregate.acc, 1.0);
    assert_eq!(report.aggregate.sc, 1.0);
    assert_eq!(report.aggregate.ff, 1.0);
    assert_eq!(report.aggregate.premt, 0.0);
    assert_eq!(report.aggregate.sr, 2.0);
    assert_eq!(report.setting, "zeroshot");
    assert_eq!(report.per_task.len(), 12);

    // No episode can count at a zero budget; all resolve by round 2.
    assert_eq!(report.accuracy_at_n[0], 0.0);
    assert_eq!(report.accuracy_at_n[2], 1.0);
    assert_eq!(*report.accuracy_at_n.last().unwrap(), 1.0);
    for w in report.accuracy_at_n.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

/// Always asks for another search; never answers.
struct Looper;

impl AgentAdapter for Looper {
    fn step(
        &mut self,
        _conversation: &Conversation,
        _tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError> {
        Ok(AgentMove::tool(
            "search_information",
            json!({"query": "oranges"}),
        ))
    }
}

#[test]
fn runaway_agents_are_truncated_at_the_round_cap() {
    let fx = fixture();
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
    let mut agent = Looper;
    let trace = run_episode(&fx.tasks[1], &transport, &mut agent, &EpisodeConfig::default()).unwrap();

    assert_eq!(trace.steps.len(), 50);
    assert!(trace.answer_events.is_empty());
    assert!(trace.failure.is_none());
    let oracle = oracle_doc_ids(&fx.tasks[1], &fx.documents);
    let s = score(&trace, &fx.tasks[1].gold_answer, &oracle);
    assert!(!s.acc && !s.ff);
    assert_eq!(s.sr, 50);
}

#[test]
fn a_tighter_environment_cap_also_ends_the_episode() {
    let fx = fixture();
    // Environment allows 3 rounds; the client would allow 10.
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 3));
    let mut agent = Looper;
    let trace = run_episode(
        &fx.tasks[1],
        &transport,
        &mut agent,
        &EpisodeConfig { max_rounds: 10 },
    )
    .unwrap();
    assert_eq!(trace.steps.len(), 3);
    assert!(trace.answer_events.is_empty());
}

/// Fails on its first decision.
struct Flaky;

impl AgentAdapter for Flaky {
    fn step(
        &mut self,
        _conversation: &Conversation,
        _tools: &[ToolSchema],
    ) -> Result<AgentMove, HarnessError> {
        Err(HarnessError::Agent("backend unreachable".to_string()))
    }
}

#[test]
fn agent_failures_are_recorded_and_still_scored() {
    let fx = fixture();
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
    let config = EvalConfig {
        seeds: vec![0],
        workers: 1,
        ..EvalConfig::default()
    };
    let (episodes, report) = run_eval(
        &fx.tasks,
        &fx.documents,
        &transport,
        "flaky",
        &|_task, _seed| Box::new(Flaky),
        &config,
    )
    .unwrap();

    assert_eq!(episodes.len(), 6);
    for e in &episodes {
        assert_eq!(e.trace.failure.as_deref(), Some("agent: backend unreachable"));
        assert!(!e.score.acc);
        assert_eq!(e.score.sr, 0);
    }
    assert_eq!(report.aggregate.acc, 0.0);
    assert_eq!(report.aggregate.ff, 0.0);
}

#[test]
fn episodes_replay_identically() {
    let fx = fixture();
    let run = || {
        let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
        let mut agent = OracleAgent::new(&fx.tasks[2], &fx.documents);
        run_episode(&fx.tasks[2], &transport, &mut agent, &EpisodeConfig::default())
            .unwrap()
            .zeroed_durations()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap()
    );
}

#[test]
fn provisional_lines_on_tool_turns_count_as_premature() {
    let fx = fixture();
    let transport = LocalTransport::new(engine(&fx, ToolSetting::ZeroShot, 50));
    let own_doc = &fx.documents[0].content;
    let mut agent = ScriptedAgent::new([
        AgentMove::tool_with_text(
            "search_information",
            json!({"query": own_doc}),
            "**** 14\nstill need the paperbacks",
        ),
        AgentMove::tool(
            "search_information",
            json!({"query": &fx.documents[1].content}),
        ),
        AgentMove::answer("#### 46"),
    ]);
    let trace = run_episode(&fx.tasks[0], &transport, &mut agent, &EpisodeConfig::default()).unwrap();
    assert_eq!(trace.steps.len(), 2);
    assert_eq!(trace.answer_events.len(), 2);
    let oracle = oracle_doc_ids(&fx.tasks[0], &fx.documents);
    let s = score(&trace, &fx.tasks[0].gold_answer, &oracle);
    assert!(s.acc && s.sc && s.premt);
    let cover = s.coverage_step.expect("both documents found");
    assert_eq!(s.er, 2 - cover);
}
