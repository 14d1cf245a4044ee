// Linked against a throwaway shared library that is removed afterwards.
int judge_fixture_missing_symbol();

int main() { return judge_fixture_missing_symbol(); }
