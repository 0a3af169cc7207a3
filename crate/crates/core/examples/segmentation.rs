//! Split an article into paragraphs, sentences and words with character spans.
//!
//! cargo run --example segmentation

use metamorph::textmodel::{split_paragraphs, split_sentences, split_words, TextUnit};

fn main() {
    let article = TextUnit::canonical_article(
        "BDNF signals through TrkB. It activates MAPK.\r\n\r\n  Insulin lowers glucose. Leptin acts on the hypothalamus.  \n",
    )
    .unwrap();
    println!("{:?}", article.text);
    for (p, pspan) in split_paragraphs(&article).unwrap() {
        println!("paragraph {pspan}");
        for (s, sspan) in split_sentences(&p).unwrap() {
            let words: Vec<String> = split_words(&s.text).into_iter().map(|(w, _)| w).collect();
            println!("  sentence {} {:?}", sspan.shifted(pspan.start as i64).unwrap(), words);
        }
    }
}
