//! Fits naive Bayes on the phrase banks and scores a few observations.
//!
//! cargo run --example naive_bayes_sentiment

use senti_shape::envsim::templates;
use senti_shape::sentiment::{fit_naive_bayes, gate, nb_polarity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tiny = fit_naive_bayes(&["good job", "well done"], &["you died"], 1.0)?;
    for text in ["you died", "good job", ""] {
        println!("tiny model  {:>+.3}  {text:?}", nb_polarity(&tiny, text).value);
    }

    let model = fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0)?;
    println!("\nbank model: {} words", model.vocab.len() - 2);
    let samples = [
        "Well done, that was the right call. You walk east along the corridor.",
        "That was a mistake. You walk west along the corridor.",
        "You bump into the wall.",
        "You are in the pantry. You see the potato here.",
        "*** You have won ***",
    ];
    for text in samples {
        let p = nb_polarity(&model, text).value;
        println!("{p:>+.3}  gated {:>+.3}  {text}", gate(p, 0.7));
    }
    Ok(())
}
