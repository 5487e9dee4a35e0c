fn main() {
    println!("nakao");
}
