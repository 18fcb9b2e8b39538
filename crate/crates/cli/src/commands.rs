use std::collections::BTreeMap;
use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use revcipher_core::builders::{
    self, random_samples, verify_against_reference, BuildOptions, CipherLayout, Variant,
};
use revcipher_core::grover::{
    comparison_fixture, estimate, render_attack_table, render_comparison, AttackCost,
    AttackParameters, ComparisonRow, GatePolicy, NistThresholds,
};
use revcipher_core::resources::{self, render_table};
use revcipher_core::synth::{
    builtin_sbox_circuits, circuit_implements, synthesize, GateLibrary, SynthError,
    SynthesisOptions, SynthesisResult,
};
use revcipher_core::{Circuit, CircuitDocument, Cipher, DecompositionModel, ResourceSummary, SboxTable};

use crate::report::{Report, RunManifest, EXIT_BUDGET, EXIT_MISMATCH, EXIT_OK, EXIT_VALIDATION};
use crate::{CipherArgs, Cli, Command, PolicyArg};

pub fn exit_code_for(e: &anyhow::Error) -> i32 {
    match e.downcast_ref::<SynthError>() {
        Some(SynthError::NotFound { .. } | SynthError::StateLimit { .. }) => EXIT_BUDGET,
        _ => EXIT_VALIDATION,
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let (report, code) = match &cli.command {
        Command::Synth {
            table,
            name,
            trailing_toffoli,
            budget,
            max_states,
            weights,
            out,
            listing,
        } => {
            let mut options = SynthesisOptions::default().trailing_toffoli(*trailing_toffoli).budget(*budget);
            options.max_states = *max_states;
            if let Some(w) = weights {
                options.library = parse_weights(w)?;
            }
            cmd_synth(table, name, &options, out, listing)?
        }
        Command::Build { cipher, out } => cmd_build(cipher, out)?,
        Command::Verify {
            cipher,
            circuit,
            samples,
            seed,
            inject_fault,
        } => cmd_verify(cipher, circuit.as_deref(), *samples, *seed, *inject_fault)?,
        Command::Count { circuit, name, out } => cmd_count(circuit, name.as_deref(), out)?,
        Command::Estimate {
            summary,
            key_bits,
            block_bits,
            policy,
            thresholds,
            name,
        } => cmd_estimate(summary, *key_bits, *block_bits, *policy, thresholds.as_deref(), name.as_deref())?,
        Command::ExportQasm { circuit, out } => cmd_export_qasm(circuit, out)?,
        Command::Tables { thresholds } => cmd_tables(thresholds.as_deref())?,
    };
    report.emit(cli.format);
    Ok(code)
}

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

fn write(path: &str, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {path}"))
}

fn to_pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn load_circuit(path: &str) -> Result<CircuitDocument> {
    serde_json::from_str(&read(path)?).with_context(|| format!("parsing circuit file {path}"))
}

fn parse_weights(s: &str) -> Result<GateLibrary> {
    let parts: Vec<u32> = s
        .split(',')
        .map(|p| p.trim().parse::<u32>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("weights {s:?} must be three integers"))?;
    let [n, c, t] = parts[..] else {
        bail!("weights {s:?} must be three integers N,C,T");
    };
    Ok(GateLibrary::with_weights(n, c, t)?)
}

fn sbox_summary(r: &SynthesisResult) -> Value {
    json!({
        "name": r.name,
        "table": r.table,
        "cost": r.cost,
        "histogram": r.histogram,
        "nodes_explored": r.nodes_explored,
        "trailing_toffoli": r.ends_with_toffoli(),
    })
}

fn cmd_synth(
    table_hex: &str,
    name: &str,
    options: &SynthesisOptions,
    out: &Option<String>,
    listing_path: &Option<String>,
) -> Result<(Report, i32)> {
    let table = SboxTable::from_hex(name, table_hex)?;
    let result = synthesize(&table, options)?;
    let names: Vec<String> = (0..4).map(|w| format!("x{}", 3 - w)).collect();
    let listing = result.circuit.listing(&names);

    let mut manifest = RunManifest::new("synth");
    manifest.inputs.push(table.to_hex());
    manifest.output = out.clone();
    let doc = CircuitDocument {
        circuit: result.circuit.clone(),
        metadata: Some(json!({ "sbox": sbox_summary(&result), "manifest": manifest })),
    };
    if let Some(path) = out {
        write(path, &to_pretty(&doc))?;
    }
    if let Some(path) = listing_path {
        write(path, &listing)?;
    }
    let h = &result.histogram;
    let text = format!(
        "S-box {} = {}\ncost {} (Toffoli {}, CNOT {}, NOT {}), {} nodes explored\n{}",
        result.name,
        result.table,
        result.cost,
        h.toffoli,
        h.cnot,
        h.not,
        result.nodes_explored,
        listing
    );
    let json = json!({ "manifest": manifest, "result": sbox_summary(&result), "circuit": doc, "listing": listing });
    Ok((Report { json, text }, EXIT_OK))
}

/// Bundled S-box circuits with `NAME=FILE` overrides applied.
fn sbox_set(overrides: &[String]) -> Result<BTreeMap<String, SynthesisResult>> {
    let mut map = builtin_sbox_circuits();
    let lib = GateLibrary::default();
    for o in overrides {
        let (name, path) = o
            .split_once('=')
            .ok_or_else(|| anyhow!("--sbox expects NAME=FILE, got {o:?}"))?;
        let table = SboxTable::named(name)?;
        let doc = load_circuit(path)?;
        if !circuit_implements(&doc.circuit, &table) {
            bail!("circuit in {path} does not implement S-box {name}");
        }
        map.insert(name.to_string(), SynthesisResult::from_circuit(&table, doc.circuit, &lib));
    }
    Ok(map)
}

fn build_options(args: &CipherArgs) -> Result<BuildOptions> {
    let rounds = args.rounds.unwrap_or(args.cipher.full_rounds());
    Ok(BuildOptions::new(rounds, args.variant, sbox_set(&args.sboxes)?))
}

fn manifest_for(command: &str, args: &CipherArgs, rounds: usize) -> RunManifest {
    let mut m = RunManifest::new(command);
    m.cipher = Some(args.cipher);
    m.variant = (args.cipher == Cipher::Lblock).then_some(args.variant);
    m.rounds = Some(rounds);
    m.inputs = args.sboxes.clone();
    m
}

fn circuit_overview(c: &Circuit) -> Value {
    json!({
        "wires": c.wire_count(),
        "gates": c.len(),
        "toffoli": c.count(revcipher_core::GateKind::Toffoli),
        "cnot": c.count(revcipher_core::GateKind::Cnot),
        "not": c.count(revcipher_core::GateKind::Not),
    })
}

fn cmd_build(args: &CipherArgs, out: &Option<String>) -> Result<(Report, i32)> {
    let opts = build_options(args)?;
    let circuit = builders::build(args.cipher, &opts)?;
    let mut manifest = manifest_for("build", args, opts.rounds);
    manifest.output = out.clone();
    let mut meta = builders::metadata(args.cipher, &opts);
    meta["manifest"] = serde_json::to_value(&manifest)?;
    let doc = CircuitDocument {
        circuit,
        metadata: Some(meta.clone()),
    };
    if let Some(path) = out {
        write(path, &to_pretty(&doc))?;
    }
    let overview = circuit_overview(&doc.circuit);
    let text = format!(
        "{} {} rounds: {} wires, {} gates (Toffoli {}, CNOT {}, NOT {}){}\n",
        args.cipher.name(),
        opts.rounds,
        overview["wires"],
        overview["gates"],
        overview["toffoli"],
        overview["cnot"],
        overview["not"],
        out.as_ref().map(|p| format!(", written to {p}")).unwrap_or_default()
    );
    let json = json!({ "manifest": manifest, "circuit": overview, "metadata": meta });
    Ok((Report { json, text }, EXIT_OK))
}

fn cmd_verify(
    args: &CipherArgs,
    circuit_path: Option<&str>,
    samples: usize,
    seed: u64,
    inject_fault: Option<usize>,
) -> Result<(Report, i32)> {
    if samples == 0 {
        bail!("--samples must be at least 1");
    }
    let rounds = args.rounds.unwrap_or(args.cipher.full_rounds());
    let mut circuit = match circuit_path {
        Some(p) => load_circuit(p)?.circuit,
        None => builders::build(args.cipher, &build_options(args)?)?,
    };
    let layout = CipherLayout::of(args.cipher);
    if circuit.wire_count() != layout.wire_count {
        bail!(
            "circuit has {} wires, {} needs {}",
            circuit.wire_count(),
            args.cipher.name(),
            layout.wire_count
        );
    }
    if let Some(i) = inject_fault {
        if i >= circuit.len() {
            bail!("--inject-fault {i} is past the last gate ({} gates)", circuit.len());
        }
        let mut gates = circuit.gates().to_vec();
        gates.remove(i);
        circuit = Circuit::from_parts(circuit.wire_count(), gates, circuit.relabel().to_vec())?;
    }
    let pairs = random_samples(args.cipher, samples, seed);
    let rep = verify_against_reference(&circuit, args.cipher, rounds, &pairs, seed)?;
    let mut manifest = manifest_for("verify", args, rounds);
    manifest.seed = Some(seed);
    if let Some(p) = circuit_path {
        manifest.inputs.push(p.to_string());
    }
    let mut text = format!(
        "{} {} rounds: {}/{} samples agree (seed {seed})\n",
        args.cipher.name(),
        rounds,
        rep.samples - rep.mismatches,
        rep.samples
    );
    if let Some(m) = &rep.first_mismatch {
        text.push_str(&format!(
            "first mismatch: sample {} pt={} key={}\n  state expected {} got {}\n  key   expected {} got {}\n",
            m.sample, m.plaintext, m.key, m.expected_state, m.got_state, m.expected_key, m.got_key
        ));
    }
    let code = if rep.passed() { EXIT_OK } else { EXIT_MISMATCH };
    let json = json!({
        "manifest": manifest,
        "fault_injected_at": inject_fault,
        "report": rep,
    });
    Ok((Report { json, text }, code))
}

fn cmd_count(path: &str, name: Option<&str>, out: &Option<String>) -> Result<(Report, i32)> {
    let doc = load_circuit(path)?;
    let summary = resources::count(&doc.circuit, &DecompositionModel::default());
    let label = name.map(str::to_string).unwrap_or_else(|| {
        doc.metadata
            .as_ref()
            .and_then(|m| m.get("cipher"))
            .and_then(Value::as_str)
            .unwrap_or("circuit")
            .to_string()
    });
    let mut manifest = RunManifest::new("count");
    manifest.inputs.push(path.to_string());
    manifest.output = out.clone();
    let json = json!({ "manifest": manifest, "name": label, "summary": summary });
    if let Some(p) = out {
        write(p, &to_pretty(&json))?;
    }
    let text = render_table(&[(label, summary)]);
    Ok((Report { json, text }, EXIT_OK))
}

/// Accepts a `count` report or a bare summary object.
fn load_summary(path: &str) -> Result<(Option<String>, ResourceSummary)> {
    let v: Value = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {path}"))?;
    let name = v.get("name").and_then(Value::as_str).map(str::to_string);
    let inner = v.get("summary").cloned().unwrap_or(v);
    let s = serde_json::from_value(inner).with_context(|| format!("{path} holds no resource summary"))?;
    Ok((name, s))
}

fn load_thresholds(path: Option<&str>) -> Result<NistThresholds> {
    match path {
        Some(p) => Ok(NistThresholds::from_json(&read(p)?)?),
        None => Ok(NistThresholds::default()),
    }
}

fn policies(p: PolicyArg) -> Vec<GatePolicy> {
    match p {
        PolicyArg::AllGates => vec![GatePolicy::AllGates],
        PolicyArg::CliffordOnly => vec![GatePolicy::CliffordOnly],
        PolicyArg::Both => vec![GatePolicy::AllGates, GatePolicy::CliffordOnly],
    }
}

fn cmd_estimate(
    path: &str,
    key_bits: u32,
    block_bits: u32,
    policy: PolicyArg,
    thresholds: Option<&str>,
    name: Option<&str>,
) -> Result<(Report, i32)> {
    let params = AttackParameters::new(key_bits, block_bits)?;
    let (stored_name, summary) = load_summary(path)?;
    let label = name.map(str::to_string).or(stored_name).unwrap_or_else(|| "circuit".into());
    let th = load_thresholds(thresholds)?;
    let rows: Vec<(String, AttackCost)> = policies(policy)
        .into_iter()
        .map(|p| (label.clone(), estimate(&summary, &params, p, &th)))
        .collect();
    let mut manifest = RunManifest::new("estimate");
    manifest.inputs.push(path.to_string());
    manifest.inputs.extend(thresholds.map(str::to_string));
    let policies_differ = rows.len() == 2 && rows[0].1.total_gates.exact != rows[1].1.total_gates.exact;
    let mut text = render_attack_table(&rows);
    if policies_differ {
        text.push_str("note: the two gate policies give different total-gate figures; both are shown\n");
    }
    let json = json!({
        "manifest": manifest,
        "name": label,
        "summary": summary,
        "thresholds_log2": th.levels,
        "estimates": rows.iter().map(|(_, c)| c).collect::<Vec<_>>(),
        "policies_differ": policies_differ,
    });
    Ok((Report { json, text }, EXIT_OK))
}

fn cmd_export_qasm(path: &str, out: &Option<String>) -> Result<(Report, i32)> {
    let doc = load_circuit(path)?;
    let qasm = doc.circuit.to_qasm();
    let mut manifest = RunManifest::new("export-qasm");
    manifest.inputs.push(path.to_string());
    manifest.output = out.clone();
    let text = match out {
        Some(p) => {
            write(p, &qasm)?;
            format!("wrote {} gates to {p}\n", doc.circuit.len())
        }
        None => qasm.clone(),
    };
    let json = json!({ "manifest": manifest, "qasm": qasm });
    Ok((Report { json, text }, EXIT_OK))
}

fn cmd_tables(thresholds: Option<&str>) -> Result<(Report, i32)> {
    let sboxes = builtin_sbox_circuits();
    let model = DecompositionModel::default();
    let th = load_thresholds(thresholds)?;
    let specs = [
        ("LBlock (original)", Cipher::Lblock, Variant::Original),
        ("LBlock (improved)", Cipher::Lblock, Variant::Improved),
        ("LiCi", Cipher::Lici, Variant::Original),
    ];
    let mut counts = Vec::new();
    let mut attacks = Vec::new();
    for (label, cipher, variant) in specs {
        let opts = BuildOptions::new(cipher.full_rounds(), variant, sboxes.clone());
        let c = builders::build(cipher, &opts)?;
        let s = resources::count(&c, &model);
        let params = AttackParameters::new(cipher.key_bits() as u32, cipher.block_bits() as u32)?;
        for p in [GatePolicy::AllGates, GatePolicy::CliffordOnly] {
            attacks.push((label.to_string(), estimate(&s, &params, p, &th)));
        }
        counts.push((label.to_string(), s));
    }
    let mut comparison: Vec<ComparisonRow> = counts[1..]
        .iter()
        .map(|(n, s)| ComparisonRow::from_summary(n.clone(), s))
        .collect();
    comparison.extend(comparison_fixture());
    let text = format!(
        "Resources per encryption\n{}\nComparison with other ciphers\n{}\nGrover key search\n{}",
        render_table(&counts),
        render_comparison(&comparison),
        render_attack_table(&attacks)
    );
    let mut manifest = RunManifest::new("tables");
    manifest.inputs.extend(thresholds.map(str::to_string));
    let json = json!({
        "manifest": manifest,
        "resources": counts.iter().map(|(n, s)| json!({"name": n, "summary": s})).collect::<Vec<_>>(),
        "comparison": comparison,
        "attacks": attacks.iter().map(|(n, c)| json!({"name": n, "estimate": c})).collect::<Vec<_>>(),
    });
    Ok((Report { json, text }, EXIT_OK))
}
