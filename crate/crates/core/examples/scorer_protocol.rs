//! Serves a naive Bayes model over the line protocol and queries it, first
//! with raw lines and then through the client.
//!
//! cargo run --example scorer_protocol

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::time::Duration;

use senti_shape::envsim::templates;
use senti_shape::sentiment::protocol::StubServer;
use senti_shape::sentiment::{fit_naive_bayes, nb_polarity, ScorerClient};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let model = fit_naive_bayes(templates::POSITIVE, templates::NEGATIVE, 1.0)?;
    let server = StubServer::spawn(move |text: &str| Ok(nb_polarity(&model, text).value))?;
    println!("listening on {}", server.addr());

    let stream = TcpStream::connect(server.addr())?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    for line in [r#"{"id":1,"text":"Nicely done."}"#, r#"{"id":2,"text":"Oops."}"#, "not json"] {
        writeln!(writer, "{line}")?;
        let mut reply = String::new();
        reader.read_line(&mut reply)?;
        print!("-> {line}\n<- {reply}");
    }

    let mut client = ScorerClient::connect(&server.addr().to_string(), Duration::from_secs(5))?;
    println!("client: {:+.3}", client.request("That was a mistake.")?);
    Ok(())
}
