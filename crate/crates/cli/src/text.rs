use serde_json::Value;

use crate::Command;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn matrix(v: &Value) -> String {
    match v {
        Value::Array(rows) => {
            let rows: Vec<String> = rows
                .iter()
                .map(|r| match r {
                    Value::Array(xs) => format!("[{}]", xs.iter().map(scalar).collect::<Vec<_>>().join(", ")),
                    other => scalar(other),
                })
                .collect();
            format!("[{}]", rows.join(", "))
        }
        other => scalar(other),
    }
}

fn group(orders: &Value) -> String {
    match orders.as_array() {
        Some(os) if !os.is_empty() => os.iter().map(|d| format!("Z/{}", scalar(d))).collect::<Vec<_>>().join(" + "),
        _ => "0".into(),
    }
}

fn complex(v: &Value) -> String {
    match v {
        Value::Object(m) => format!("{} + {}i", scalar(&m["re"]), scalar(&m["im"])),
        Value::Array(p) if p.len() == 2 => format!("{} + {}i", scalar(&p[0]), scalar(&p[1])),
        other => scalar(other),
    }
}

fn analyze(d: &Value) -> String {
    let mut out = vec![
        format!("NS gram:           {}", matrix(&d["input_gram"])),
        format!("signature:         {}", matrix(&d["signature"])),
        format!("determinant:       {}", scalar(&d["determinant"])),
        format!("discriminant:      {}", group(&d["disc_orders"])),
        format!("simple:            {}", scalar(&d["simple"])),
        format!("condition diamond: {}", scalar(&d["condition_diamond"])),
        format!("admits mirror:     {}", scalar(&d["admits_mirror"])),
        format!("self-mirror:       {}", scalar(&d["self_mirror"])),
        format!("mirror NS:         {}", matrix(&d["mirror_representative_gram"])),
    ];
    if let Some(notes) = d["notes"].as_array() {
        out.extend(notes.iter().map(|n| format!("  - {}", scalar(n))));
    }
    out.join("\n")
}

fn oracle(d: &Value) -> String {
    let mut out = vec![format!(
        "{} instances, {} disagreements",
        scalar(&d["instances"]),
        scalar(&d["disagreements"])
    )];
    for row in d["rows"].as_array().into_iter().flatten() {
        if row["agree"] != Value::Bool(true) {
            out.push(format!(
                "  {}: criterion {}, brute force {}, witness {}",
                matrix(&row["gram"]),
                scalar(&row["criterion"]),
                scalar(&row["brute_force"]),
                scalar(&row["witness_verified"])
            ));
        }
    }
    out.join("\n")
}

fn sweep(d: &Value) -> String {
    let mut out = vec![format!("family {}", scalar(&d["family"]))];
    for item in d["items"].as_array().into_iter().flatten() {
        let n = scalar(&item["n"]);
        match item.get("cases").and_then(Value::as_array) {
            Some(cases) => {
                for c in cases {
                    out.push(format!(
                        "n={n:<4} {:<22} det {:<6} self-mirror {:<5} determinant rule {:<5}{}",
                        matrix(&c["gram"]),
                        scalar(&c["determinant"]),
                        scalar(&c["self_mirror"]),
                        scalar(&c["determinant_rule"]),
                        if c["agree"] == Value::Bool(true) { "" } else { "  MISMATCH" }
                    ));
                }
            }
            None if item.get("mirror_ns").is_some() => out.push(format!(
                "n={n:<4} {} <-> {}: {}",
                matrix(&item["ns"]),
                matrix(&item["mirror_ns"]),
                scalar(&item["mirror_partners"])
            )),
            None => out.push(format!(
                "n={n:<4} self-mirror {} witness {}",
                scalar(&item["self_mirror"]),
                matrix(&item["witness"])
            )),
        }
    }
    out.join("\n")
}

pub fn render(command: Command, d: &Value) -> String {
    match command {
        Command::Analyze => analyze(d),
        Command::MirrorPair => format!(
            "mirror partners: {}\n{} vs {}: {}\nanti-isometry: {}",
            scalar(&d["mirror_partners"]),
            group(&d["disc_orders_a"]),
            group(&d["disc_orders_b"]),
            scalar(&d["reason"]),
            matrix(&d["anti_isometry"])
        ),
        Command::SelfMirror => format!(
            "self-mirror: {}\ndiscriminant: {}\n{}\nwitness: {}",
            scalar(&d["self_mirror"]),
            group(&d["disc_form"]["orders"]),
            scalar(&d["reason"]),
            matrix(&d["witness"]["matrix"])
        ),
        Command::Dual => format!(
            "omega:  B = {}, kappa = {}\ndual:   B = {}, kappa = {}\nvol(omega) = {}\nvol(dual)  = {}",
            matrix(&d["omega"]["b"]),
            matrix(&d["omega"]["kappa"]),
            matrix(&d["dual"]["b"]),
            matrix(&d["dual"]["kappa"]),
            complex(&d["volume"]),
            complex(&d["dual_volume"])
        ),
        Command::Period => format!(
            "plucker: [{}]\nv.v = {}\nv.conj(v) = {}\ntorus: {}\nadmissible: {}",
            d["plucker"].as_array().into_iter().flatten().map(complex).collect::<Vec<_>>().join(", "),
            complex(&d["wedge_square"]),
            complex(&d["hermitian"]),
            scalar(&d["torus"]),
            scalar(&d["admissible"])
        ),
        Command::Oracle => oracle(d),
        Command::Sweep => sweep(d),
    }
}
