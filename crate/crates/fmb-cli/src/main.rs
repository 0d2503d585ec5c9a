fn main() {
    println!("fmb");
}
