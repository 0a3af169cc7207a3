//! Extract entities from a sentence with a small gazetteer.
//!
//! cargo run --example extract_entities

use metamorph::recognizer::{extract, Gazetteer};

fn main() {
    let gazetteer = Gazetteer::new(["Neuritin", "neurite", "protein kinase", "protein kinase C"]).unwrap();
    let text = "Neuritin plays an important role in neurite outgrowth via protein kinase C.";
    let result = extract(text, &gazetteer, None).unwrap();
    for e in &result.entities {
        println!("{:<20} [{}, {})", e.term, e.span.start, e.span.end);
    }
    println!("{}", serde_json::to_string(&result.entities).unwrap());
}
