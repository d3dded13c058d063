from trackhom.main import main

main()
