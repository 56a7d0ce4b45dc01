use std::path::PathBuf;

use tidss_core::synthesis::{
    chunk_text, GuidelineTable, MockBackend, MockReply, NoSleep, RetryPolicy, SchemaError,
    Severity, SynthesisConfig, SynthesisError, Synthesizer,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

const GENERATE: &str = "generate a traffic incident mitigation strategies table";
const REFINE: &str = "Refine the traffic incident mitigation strategies table";

fn pipeline_mock() -> MockBackend {
    MockBackend::new("mock")
        .with_rule(REFINE, MockReply::Text(fixture("guideline_table.md")))
        .with_rule(
            GENERATE,
            MockReply::Text(fixture("guideline_table_draft.md")),
        )
}

fn config() -> SynthesisConfig {
    SynthesisConfig {
        retry: RetryPolicy::immediate(3),
        ..SynthesisConfig::default()
    }
}

#[test]
fn long_document_splits_into_three_chunks() {
    let doc = fixture("guideline_source.txt");
    let chunks = chunk_text(&doc, 6000);
    assert_eq!(
        chunks.iter().map(|c| c.token_count).collect::<Vec<_>>(),
        vec![6000, 6000, 1000]
    );
    assert_eq!(
        chunks.iter().map(|c| c.text.as_str()).collect::<String>(),
        doc
    );

    let mock = MockBackend::new("mock");
    let config = config();
    let out = Synthesizer::new(&mock, &config, &NoSleep)
        .run_s_cycle(&doc, "Extract the keypoints.")
        .unwrap();
    assert_eq!(out.chunk_count, 3);
    assert_eq!(out.partials.len(), 3);
    assert_eq!(mock.calls(), 4);
}

#[test]
fn pipeline_yields_the_refined_table() {
    let doc = fixture("guideline_source.txt");
    let mock = pipeline_mock();
    let config = config();
    let result = Synthesizer::new(&mock, &config, &NoSleep)
        .synthesize_guidelines(&doc)
        .unwrap();

    let ids: Vec<u32> = result.table.rows.iter().map(|r| r.scenario_id).collect();
    assert_eq!(ids, (1..=10).collect::<Vec<_>>());
    let row5 = &result.table.rows[4];
    assert_eq!(row5.incident_type, "Overturned Truck");
    assert_eq!(row5.severity, Severity::Moderate);
    assert_eq!(row5.location, "Highway On-ramp/Off-ramp");
    assert_eq!(row5.actions.len(), 3);

    // the draft repeats scenario 5; refinement removed it
    assert!(matches!(
        GuidelineTable::parse(&result.generated_text),
        Err(SchemaError::DuplicateScenario(5))
    ));
    // five S-cycles of 3 chunks + 1 synthesis each, then generate and refine
    assert_eq!(mock.calls(), 5 * 4 + 2);
    for heading in [
        "Decision tables",
        "Keypoints and highlights",
        "Incident aspects",
        "Response actions",
        "Scenario-action pairs",
    ] {
        assert!(result.generation_prompt.contains(heading), "{heading}");
    }
}

#[test]
fn pipeline_is_reproducible() {
    let doc = fixture("guideline_source.txt");
    let config = config();
    let (a, b) = (pipeline_mock(), pipeline_mock());
    let first = Synthesizer::new(&a, &config, &NoSleep)
        .synthesize_guidelines(&doc)
        .unwrap();
    let second = Synthesizer::new(&b, &config, &NoSleep)
        .synthesize_guidelines(&doc)
        .unwrap();
    assert_eq!(first, second);
    assert_eq!(first.table.to_markdown(), second.table.to_markdown());
}

#[test]
fn refinement_without_severity_is_a_schema_violation() {
    let without: String = fixture("guideline_table.md")
        .lines()
        .map(|line| {
            let cells: Vec<&str> = line.split('|').collect();
            // drop the third column
            let kept: Vec<&str> = cells
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != 3)
                .map(|(_, c)| *c)
                .collect();
            kept.join("|") + "\n"
        })
        .collect();
    let mock = MockBackend::new("mock")
        .with_rule(REFINE, MockReply::Text(without))
        .with_rule(
            GENERATE,
            MockReply::Text(fixture("guideline_table_draft.md")),
        );
    let config = config();
    let err = Synthesizer::new(&mock, &config, &NoSleep)
        .synthesize_guidelines("A short guideline about lane closures.")
        .unwrap_err();
    assert_eq!(
        err,
        SynthesisError::SchemaViolation(SchemaError::MissingColumn("Severity"))
    );
    // 5 cycles of 2 calls, 1 generation, 4 refine attempts
    assert_eq!(mock.calls(), 10 + 1 + 4);
}
