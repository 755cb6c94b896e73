from starmod.main import main

main()
