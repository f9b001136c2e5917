fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(145);
    let r = jouanolou::exact::verify_cn(n, 1).unwrap();
    println!("{}", serde_json::to_string_pretty(&r).unwrap());
}
